"""Mutual information and underestimation probes against slow oracles."""

import numpy as np
import pytest
from scipy import integrate

from molvae.data import load_corpus, pad_batch
from molvae.diagnostics import (
    DegenerateBatch,
    alpha_from_ratio,
    batch_mutual_information,
    gaussian_kl,
    kl_divergence_mc,
    mutual_information,
    underestimation_ratio,
)
from molvae.model import DecoderConfig, EncoderConfig, ModelConfig, SmilesVae


def _tiny_model(vocab_size: int, seed: int = 0) -> SmilesVae:
    config = ModelConfig(
        vocab_size=vocab_size,
        encoder=EncoderConfig(hidden_dim=8, n_layers=2, embed_dim=6, latent_dim=4),
        decoder=DecoderConfig(hidden_dim=8, n_layers=4, embed_dim=6, latent_dim=4),
    )
    return SmilesVae(config, seed=seed)


class TestGaussianKl:
    def test_standard_normal_is_zero(self):
        kl = gaussian_kl(np.zeros((3, 5)), np.zeros((3, 5)))
        assert np.allclose(kl, 0.0)

    def test_matches_monte_carlo(self):
        # 20 random Gaussians, each checked against a 200k-sample MC estimate
        rng = np.random.default_rng(7)
        for _ in range(20):
            dim = int(rng.integers(1, 6))
            mu = rng.normal(scale=1.5, size=dim)
            logvar = rng.normal(scale=0.8, size=dim)
            closed = gaussian_kl(mu[None, :], logvar[None, :])[0]
            mc, se = kl_divergence_mc(mu, logvar, rng, n_samples=200_000)
            assert abs(closed - mc) <= 3.0 * se + 1e-9


class TestMutualInformation:
    def test_two_component_fixture_matches_quadrature(self):
        # posteriors N(+2, 1) and N(-2, 1) in one dimension
        mu = np.array([[2.0], [-2.0]])
        logvar = np.zeros((2, 1))

        def mix(z):
            return 0.5 * (np.exp(-0.5 * (z - 2.0) ** 2)
                          + np.exp(-0.5 * (z + 2.0) ** 2)) / np.sqrt(2 * np.pi)

        def prior(z):
            return np.exp(-0.5 * z ** 2) / np.sqrt(2 * np.pi)

        marginal_kl_true, _ = integrate.quad(
            lambda z: mix(z) * np.log(mix(z) / prior(z)), -12, 12)
        mi_true = 2.0 - marginal_kl_true

        rng = np.random.default_rng(0)
        est = mutual_information(mu, logvar, rng, n_samples=10_000)
        assert est.avg_kl == pytest.approx(2.0, abs=1e-12)
        assert abs(est.mutual_info - mi_true) <= 0.05
        assert abs(est.marginal_kl - marginal_kl_true) <= 3.0 * est.stderr

    def test_identical_posteriors_have_zero_mi(self):
        # all molecules encode to the same Gaussian: I(x; z) = 0
        mu = np.tile(np.array([[0.7, -0.4]]), (16, 1))
        logvar = np.full((16, 2), -0.3)
        est = mutual_information(mu, logvar, np.random.default_rng(1),
                                 n_samples=20_000)
        assert abs(est.mutual_info) <= 3.0 * est.stderr

    def test_well_separated_posteriors_approach_log_n(self):
        # four unit Gaussians on the corners (+-3, +-3): overlap is
        # ~e^-18, so z identifies x and MI -> log(4)
        mu = np.array([[3.0, 3.0], [3.0, -3.0], [-3.0, 3.0], [-3.0, -3.0]])
        logvar = np.zeros((4, 2))
        est = mutual_information(mu, logvar, np.random.default_rng(2),
                                 n_samples=40_000)
        assert est.stderr < 0.05
        assert abs(est.mutual_info - np.log(4)) <= 3.0 * est.stderr

    def test_chunking_does_not_change_estimate(self):
        rng = np.random.default_rng(3)
        mu = rng.normal(size=(40, 3))
        logvar = rng.normal(scale=0.3, size=(40, 3))
        a = mutual_information(mu, logvar, np.random.default_rng(9),
                               n_samples=400, chunk=7)
        b = mutual_information(mu, logvar, np.random.default_rng(9),
                               n_samples=400, chunk=4096)
        assert a.mutual_info == pytest.approx(b.mutual_info, rel=1e-12)

    def test_single_posterior_rejected(self):
        with pytest.raises(DegenerateBatch):
            mutual_information(np.zeros((1, 2)), np.zeros((1, 2)),
                               np.random.default_rng(0))

    def test_batch_wrapper_runs_on_model(self, tmp_path):
        path = tmp_path / "c.smi"
        path.write_text("CCO\nCC\nOCO\nCCC\n")
        corpus = load_corpus(path, max_tokens=10)
        model = _tiny_model(len(corpus.vocab))
        ids = pad_batch(corpus.sequences)
        est = batch_mutual_information(model, ids, np.random.default_rng(0))
        assert est.n_samples == 4
        assert np.isfinite(est.mutual_info)
        # MI never exceeds the average KL term
        assert est.mutual_info <= est.avg_kl + 3.0 * est.stderr


class TestUnderestimation:
    def test_ratio_fields_consistent(self, tmp_path):
        path = tmp_path / "c.smi"
        path.write_text("CCO\nCC(C)O\nOCC\nCCC\n")
        corpus = load_corpus(path, max_tokens=12)
        model = _tiny_model(len(corpus.vocab), seed=3)
        ids = pad_batch(corpus.sequences)
        report = underestimation_ratio(model, ids, np.random.default_rng(5))
        assert report.ratio == pytest.approx(report.tf_loss / report.fr_loss)
        assert report.tf_loss > 0.0 and report.fr_loss > 0.0
        assert report.token_count == sum(len(s) - 1 for s in corpus.sequences)

    def test_alpha_is_inverse_ratio(self, tmp_path):
        path = tmp_path / "c.smi"
        path.write_text("CCO\nCCC\n")
        corpus = load_corpus(path, max_tokens=12)
        model = _tiny_model(len(corpus.vocab), seed=4)
        ids = pad_batch(corpus.sequences)
        report = underestimation_ratio(model, ids, np.random.default_rng(6))
        assert alpha_from_ratio(report) == pytest.approx(1.0 / report.ratio)
