"""Sequence VAE over SMILES tokens.

Encoder: stacked bidirectional GRU; the top layer's two end states feed
affine heads for the posterior mean and log-variance. Decoder: stacked
unidirectional GRU whose per-layer initial states are affine maps of the
latent code, with an output projection hitting the vocabulary. The token
embedding is shared between encoder and decoder; the output projection is
its own matrix.

Training decodes teacher-forced (each step conditioned on the reference
prefix). Evaluation can also decode free-running, feeding the model its
own emissions, which is the regime that exposes how far teacher forcing
understates reconstruction difficulty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .nn import GruLayerParams, gru_cell, gru_sequence, linear, uniform_init
from .vocab import EOS_ID, PAD_ID, SOS_ID


class InvalidWeight(ValueError):
    """Objective re-weighting outside the supported range."""


@dataclass(frozen=True)
class EncoderConfig:
    hidden_dim: int = 128
    n_layers: int = 2
    embed_dim: int = 64
    latent_dim: int = 16


@dataclass(frozen=True)
class DecoderConfig:
    hidden_dim: int = 128
    n_layers: int = 4
    embed_dim: int = 64
    latent_dim: int = 16


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    dtype: str = "float32"

    def __post_init__(self):
        if self.encoder.embed_dim != self.decoder.embed_dim:
            raise ValueError("shared embedding requires equal embed dims")
        if self.encoder.latent_dim != self.decoder.latent_dim:
            raise ValueError("encoder and decoder disagree on latent dim")

    @property
    def latent_dim(self) -> int:
        return self.encoder.latent_dim

    @property
    def embed_dim(self) -> int:
        return self.encoder.embed_dim


@dataclass
class LatentDistribution:
    """Diagonal Gaussian posterior q(z|x) for one batch."""

    mu: Tensor
    logvar: Tensor

    @property
    def batch_size(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class LossBreakdown:
    """Scalar training-loss components for one batch (per-molecule means)."""

    recon_sum: float
    recon_per_token: float
    kl: float
    total: float
    beta: float | None = None
    alpha: float | None = None


@dataclass
class TeacherForcedResult:
    recon_sum: Tensor           # scalar: mean over batch of summed NLL
    per_example: np.ndarray     # (B,) summed NLL per molecule
    recon_sum_value: float
    recon_per_token_value: float
    token_count: int


@dataclass
class FreeRunningResult:
    recon_sum_value: float
    recon_per_token_value: float
    token_count: int
    emitted: np.ndarray         # (B, T) token ids the model fed itself


class SmilesVae:
    def __init__(self, config: ModelConfig, seed: int = 0):
        self.config = config
        self.dtype = np.dtype(config.dtype)
        rng = np.random.default_rng(seed)
        self.params: dict[str, Tensor] = {}
        self._build(rng)

    # -- construction -----------------------------------------------------

    def _param(self, name: str, array: np.ndarray) -> Tensor:
        t = Tensor(array, requires_grad=True)
        self.params[name] = t
        return t

    def _build(self, rng: np.random.Generator) -> None:
        cfg = self.config
        enc, dec = cfg.encoder, cfg.decoder
        hd, ld, ed = enc.hidden_dim, cfg.latent_dim, cfg.embed_dim
        v = cfg.vocab_size
        dt = self.dtype

        self.embedding = self._param(
            "embedding", uniform_init(rng, (v, ed), 1.0 / np.sqrt(ed), dt))

        self.enc_layers: list[tuple[GruLayerParams, GruLayerParams]] = []
        for i in range(enc.n_layers):
            in_dim = ed if i == 0 else 2 * hd
            fwd = GruLayerParams.create(rng, in_dim, hd, dt)
            bwd = GruLayerParams.create(rng, in_dim, hd, dt)
            for tag, layer in (("fwd", fwd), ("bwd", bwd)):
                for pname, tensor in zip(("w_x", "w_h", "b_x", "b_hn"),
                                         layer.tensors()):
                    self.params[f"enc.l{i}.{tag}.{pname}"] = tensor
            self.enc_layers.append((fwd, bwd))

        head_bound = 1.0 / np.sqrt(2 * hd)
        self.mu_w = self._param("enc.mu.w", uniform_init(rng, (2 * hd, ld), head_bound, dt))
        self.mu_b = self._param("enc.mu.b", uniform_init(rng, (ld,), head_bound, dt))
        self.logvar_w = self._param(
            "enc.logvar.w", uniform_init(rng, (2 * hd, ld), head_bound, dt))
        self.logvar_b = self._param(
            "enc.logvar.b", uniform_init(rng, (ld,), head_bound, dt))

        dhd = dec.hidden_dim
        init_bound = 1.0 / np.sqrt(ld)
        self.dec_init: list[tuple[Tensor, Tensor]] = []
        self.dec_layers: list[GruLayerParams] = []
        for i in range(dec.n_layers):
            w = self._param(f"dec.init.l{i}.w", uniform_init(rng, (ld, dhd), init_bound, dt))
            bias = self._param(f"dec.init.l{i}.b", uniform_init(rng, (dhd,), init_bound, dt))
            self.dec_init.append((w, bias))
            in_dim = ed if i == 0 else dhd
            layer = GruLayerParams.create(rng, in_dim, dhd, dt)
            for pname, tensor in zip(("w_x", "w_h", "b_x", "b_hn"), layer.tensors()):
                self.params[f"dec.l{i}.{pname}"] = tensor
            self.dec_layers.append(layer)

        out_bound = 1.0 / np.sqrt(dhd)
        self.out_w = self._param("out.w", uniform_init(rng, (dhd, v), out_bound, dt))
        self.out_b = self._param("out.b", uniform_init(rng, (v,), out_bound, dt))

    # -- encoder ----------------------------------------------------------

    def encode(self, ids: np.ndarray) -> LatentDistribution:
        """Posterior parameters for a padded (B, T) id batch."""
        mask = (ids != PAD_ID).astype(self.dtype)
        b = ids.shape[0]
        x = ad.embedding(self.embedding, ids)
        zeros = Tensor(np.zeros((b, self.config.encoder.hidden_dim), dtype=self.dtype))
        for fwd, bwd in self.enc_layers:
            states_f = gru_sequence(x, zeros, fwd, mask=mask, reverse=False)
            states_b = gru_sequence(x, zeros, bwd, mask=mask, reverse=True)
            x = ad.concat([states_f, states_b], axis=2)
        # forward half of the last step + backward half of the first step
        hd = self.config.encoder.hidden_dim
        last = ad.select_time(x, ids.shape[1] - 1)
        first = ad.select_time(x, 0)
        summary = ad.concat(
            [ad.slice_cols(last, 0, hd), ad.slice_cols(first, hd, 2 * hd)], axis=1)
        mu = linear(summary, self.mu_w, self.mu_b)
        logvar = linear(summary, self.logvar_w, self.logvar_b)
        return LatentDistribution(mu=mu, logvar=logvar)

    # -- latent -----------------------------------------------------------

    def reparameterize(self, dist: LatentDistribution,
                       rng: np.random.Generator) -> Tensor:
        eps = rng.standard_normal(dist.mu.shape).astype(self.dtype)
        std = ad.exp(ad.mul(dist.logvar, 0.5))
        return ad.add(dist.mu, ad.mul(std, Tensor(eps)))

    def sample_prior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal((n, self.config.latent_dim)).astype(self.dtype)

    # -- decoder ----------------------------------------------------------

    def _decoder_init_states(self, z: Tensor) -> list[Tensor]:
        return [linear(z, w, b) for w, b in self.dec_init]

    def decode_teacher_forced(self, z: Tensor, ids: np.ndarray) -> TeacherForcedResult:
        """Mean per-molecule summed NLL under reference-prefix conditioning."""
        b, t_full = ids.shape
        inputs = ids[:, :-1]
        targets = ids[:, 1:]
        t_len = t_full - 1
        target_mask = (targets != PAD_ID).astype(self.dtype)

        x = ad.embedding(self.embedding, inputs)
        for h0, layer in zip(self._decoder_init_states(z), self.dec_layers):
            x = gru_sequence(x, h0, layer, mask=None, reverse=False)
        hd = self.config.decoder.hidden_dim
        flat = ad.reshape(x, (b * t_len, hd))
        logits = linear(flat, self.out_w, self.out_b)
        nll = ad.softmax_cross_entropy(
            logits, targets.reshape(-1), target_mask.reshape(-1))
        per_seq = ad.sum_(ad.reshape(nll, (b, t_len)), axis=1)
        recon_sum = ad.mean(per_seq)

        token_count = int(target_mask.sum())
        per_example = per_seq.data.copy()
        return TeacherForcedResult(
            recon_sum=recon_sum,
            per_example=per_example,
            recon_sum_value=float(recon_sum.data),
            recon_per_token_value=float(per_example.sum() / max(token_count, 1)),
            token_count=token_count,
        )

    def decode_free_running(self, z: np.ndarray, ids: np.ndarray,
                            rng: np.random.Generator,
                            mode: str = "sample") -> FreeRunningResult:
        """Score the reference under the model's own-emission conditioning.

        At each step the reference token is scored, but the token fed back
        is the model's emission (sampled or greedy) — never the reference.
        Gradient-free.
        """
        b, t_full = ids.shape
        targets = ids[:, 1:]
        t_len = t_full - 1
        target_mask = (targets != PAD_ID).astype(np.float64)

        with ad.no_grad():
            h_layers = [np.asarray(t.data) for t in self._decoder_init_states(Tensor(z))]
        current = np.full(b, SOS_ID, dtype=np.int64)
        total_nll = 0.0
        per_example = np.zeros(b, dtype=np.float64)
        emitted = np.zeros((b, t_len), dtype=np.int64)
        for t in range(t_len):
            x = self.embedding.data[current]
            for i, layer in enumerate(self.dec_layers):
                h_layers[i], _ = gru_cell(x, h_layers[i], layer)
                x = h_layers[i]
            logits = x @ self.out_w.data + self.out_b.data
            log_probs = _log_softmax(logits)
            rows = np.arange(b)
            step_nll = -log_probs[rows, targets[:, t]] * target_mask[:, t]
            per_example += step_nll
            total_nll += float(step_nll.sum())
            current = _emit(logits, rng, mode)
            emitted[:, t] = current

        token_count = int(target_mask.sum())
        return FreeRunningResult(
            recon_sum_value=float(per_example.mean()),
            recon_per_token_value=total_nll / max(token_count, 1),
            token_count=token_count,
            emitted=emitted,
        )

    def generate(self, z: np.ndarray, max_len: int, rng: np.random.Generator,
                 mode: str = "sample") -> tuple[list[list[int]], np.ndarray]:
        """Decode token ids from latents until EOS or the step cap.

        Returns (rows, reached_eos): one id list per row without SOS/EOS,
        and a boolean flag per row. Rows that hit the cap without emitting
        EOS come back flagged False (callers treat those as failed decodes).
        """
        b = z.shape[0]
        with ad.no_grad():
            h_layers = [np.asarray(t.data) for t in self._decoder_init_states(Tensor(z))]
        current = np.full(b, SOS_ID, dtype=np.int64)
        alive = np.ones(b, dtype=bool)
        finished = np.zeros(b, dtype=bool)
        emitted = np.full((b, max_len), EOS_ID, dtype=np.int64)
        for t in range(max_len):
            x = self.embedding.data[current]
            for i, layer in enumerate(self.dec_layers):
                h_layers[i], _ = gru_cell(x, h_layers[i], layer)
                x = h_layers[i]
            logits = x @ self.out_w.data + self.out_b.data
            current = _emit(logits, rng, mode)
            just_ended = alive & (current == EOS_ID)
            finished |= just_ended
            emitted[:, t] = np.where(alive, current, EOS_ID)
            alive &= ~just_ended
            if not alive.any():
                break
            current = np.where(alive, current, EOS_ID)

        rows: list[list[int]] = []
        for r in range(b):
            row = emitted[r]
            ends = np.flatnonzero(row == EOS_ID)
            cut = ends[0] if ends.size else max_len
            rows.append(row[:cut].tolist())
        return rows, finished

    # -- objective --------------------------------------------------------

    def kl_to_standard_normal(self, dist: LatentDistribution
                              ) -> tuple[Tensor, np.ndarray]:
        """Mean and per-example KL(q(z|x) || N(0, I)), closed form."""
        mu2 = ad.square(dist.mu)
        var = ad.exp(dist.logvar)
        inner = ad.sub(ad.add(mu2, var), ad.add(dist.logvar, 1.0))
        per_example = ad.mul(ad.sum_(inner, axis=1), 0.5)
        return ad.mean(per_example), per_example.data.copy()

    def step_loss(self, ids: np.ndarray, rng: np.random.Generator,
                  beta: float | None = None, alpha: float | None = None
                  ) -> tuple[Tensor, LossBreakdown]:
        """Full training objective for one batch."""
        dist = self.encode(ids)
        z = self.reparameterize(dist, rng)
        tf = self.decode_teacher_forced(z, ids)
        kl_mean, _ = self.kl_to_standard_normal(dist)
        total = rebalanced_loss(tf.recon_sum, kl_mean, beta=beta, alpha=alpha)
        breakdown = LossBreakdown(
            recon_sum=tf.recon_sum_value,
            recon_per_token=tf.recon_per_token_value,
            kl=float(kl_mean.data),
            total=float(total.data),
            beta=beta,
            alpha=alpha,
        )
        return total, breakdown


def rebalanced_loss(recon_sum: Tensor, kl: Tensor, *,
                    beta: float | None = None,
                    alpha: float | None = None) -> Tensor:
    """Weighted objective: recon + beta*KL, or alpha*recon + KL.

    Exactly one of beta and alpha must be given. beta=1 is the vanilla
    ELBO; beta<1 relieves the KL pressure that collapses the posterior;
    alpha>1 scales reconstruction up to the same effect.
    """
    if (beta is None) == (alpha is None):
        raise InvalidWeight("give exactly one of beta and alpha")
    if beta is not None:
        if not 0.0 <= beta <= 1.0:
            raise InvalidWeight(f"beta must lie in [0, 1], got {beta}")
        return ad.add(recon_sum, ad.mul(kl, float(beta)))
    if alpha < 1.0:
        raise InvalidWeight(f"alpha must be >= 1, got {alpha}")
    return ad.add(ad.mul(recon_sum, float(alpha)), kl)


def elbo(recon_sum: float, kl: float) -> float:
    """Evidence lower bound (nats per molecule, higher is better)."""
    return -(recon_sum + kl)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _emit(logits: np.ndarray, rng: np.random.Generator, mode: str) -> np.ndarray:
    """Pick next tokens: temperature-1 multinomial or greedy argmax."""
    if mode == "greedy":
        return logits.argmax(axis=1)
    if mode != "sample":
        raise ValueError(f"unknown decode mode {mode!r}")
    shifted = logits - logits.max(axis=1, keepdims=True)
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    draws = rng.random((logits.shape[0], 1))
    return (probs.cumsum(axis=1) > draws).argmax(axis=1)
