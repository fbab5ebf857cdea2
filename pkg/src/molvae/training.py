"""Training loop: annealed objective, clipping, logging, checkpoints.

The KL weight anneals linearly from zero to its target over the first
``anneal_epochs`` epochs (measured in steps), then stays flat. A run is
reproducible from its seed: parameter init, batch order, and latent
noise all derive from it.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .checkpoint import CheckpointData, load_checkpoint, save_checkpoint
from .data import Corpus, iterate_batches, load_corpus, pad_batch
from .diagnostics import mutual_information
from .metrics import MetricsRecord, append_record
from .model import DecoderConfig, EncoderConfig, ModelConfig, SmilesVae
from .nn import Adam, NonFiniteGradient, clip_grad_norm, zero_grads
from .vocab import Vocabulary


@dataclass
class TrainConfig:
    train_path: str
    out_dir: str
    valid_path: str | None = None
    max_tokens: int = 60
    epochs: int = 30
    batch_size: int = 128
    lr: float = 1e-3
    seed: int = 0
    hidden_dim: int = 128
    latent_dim: int = 16
    embed_dim: int = 64
    enc_layers: int = 2
    dec_layers: int = 4
    dtype: str = "float32"
    beta: float | None = 0.1
    alpha: float | None = None
    anneal_epochs: int = 10
    clip_norm: float = 5.0
    log_every: int = 20
    eval_batches: int = 4
    mi_samples: int = 512

    def model_config(self, vocab_size: int) -> ModelConfig:
        return ModelConfig(
            vocab_size=vocab_size,
            encoder=EncoderConfig(hidden_dim=self.hidden_dim,
                                  n_layers=self.enc_layers,
                                  embed_dim=self.embed_dim,
                                  latent_dim=self.latent_dim),
            decoder=DecoderConfig(hidden_dim=self.hidden_dim,
                                  n_layers=self.dec_layers,
                                  embed_dim=self.embed_dim,
                                  latent_dim=self.latent_dim),
            dtype=self.dtype,
        )


@dataclass
class TrainResult:
    checkpoint_path: Path
    metrics_path: Path
    model: SmilesVae
    vocab: Vocabulary
    global_step: int
    wall_time: float
    final_valid: MetricsRecord | None = None
    history: list[MetricsRecord] = field(default_factory=list)


def desk_train_config(train_path: str, out_dir: str, beta: float,
                      valid_path: str | None = None, seed: int = 0,
                      epochs: int = 30) -> TrainConfig:
    """The single-CPU desk preset used for the collapse A/B comparison."""
    return TrainConfig(
        train_path=train_path,
        valid_path=valid_path,
        out_dir=out_dir,
        max_tokens=60,
        epochs=epochs,
        # batch 32 rather than 128: per-step cost is overhead-bound at this
        # scale, so smaller batches buy 4x more optimizer steps per epoch
        batch_size=32,
        lr=1e-3,
        seed=seed,
        hidden_dim=128,
        latent_dim=16,
        embed_dim=64,
        enc_layers=2,
        dec_layers=4,
        beta=beta,
        anneal_epochs=10,
        clip_norm=5.0,
        log_every=20,
        eval_batches=4,
        mi_samples=512,
    )


def anneal_beta(step: int, anneal_steps: int, target: float) -> float:
    """Linear warm-up of the KL weight, flat at the target afterwards."""
    if anneal_steps <= 0:
        return target
    return target * min(1.0, (step + 1) / anneal_steps)


def save_model(path: str | Path, model: SmilesVae, vocab: Vocabulary,
               step: int, train_config: TrainConfig | None = None,
               optimizer: Adam | None = None) -> None:
    arrays = {name: p.data for name, p in model.params.items()}
    if optimizer is not None:
        arrays.update(optimizer.state_tensors())
    train_dict = None
    if train_config:
        train_dict = {k: str(v) if isinstance(v, Path) else v
                      for k, v in asdict(train_config).items()}
    config = {
        "model": asdict(model.config),
        "train": train_dict,
        "max_tokens": train_config.max_tokens if train_config else None,
    }
    save_checkpoint(path, config, vocab.to_list(), step, arrays)


def load_model(path: str | Path) -> tuple[SmilesVae, Vocabulary, CheckpointData]:
    data = load_checkpoint(path)
    mc = data.config["model"]
    config = ModelConfig(
        vocab_size=mc["vocab_size"],
        encoder=EncoderConfig(**mc["encoder"]),
        decoder=DecoderConfig(**mc["decoder"]),
        dtype=mc["dtype"],
    )
    model = SmilesVae(config, seed=0)
    for name, p in model.params.items():
        stored = data.arrays[name]
        if stored.shape != p.data.shape:
            raise ValueError(f"checkpoint tensor {name!r} has shape "
                             f"{stored.shape}, expected {p.data.shape}")
        p.data = stored.astype(p.data.dtype, copy=True)
    vocab = Vocabulary.from_list(data.vocab)
    return model, vocab, data


def _validation_record(model: SmilesVae, corpus: Corpus, cfg: TrainConfig,
                       step: int, epoch: int, weight: dict,
                       rng: np.random.Generator) -> MetricsRecord:
    total_nll = 0.0
    total_tokens = 0
    kl_values: list[float] = []
    mus: list[np.ndarray] = []
    logvars: list[np.ndarray] = []
    from .autodiff import no_grad

    seqs = corpus.sequences
    n_batches = min(cfg.eval_batches, math.ceil(len(seqs) / cfg.batch_size))
    with no_grad():
        for b in range(n_batches):
            ids = pad_batch(seqs[b * cfg.batch_size:(b + 1) * cfg.batch_size])
            dist = model.encode(ids)
            z = model.reparameterize(dist, rng)
            tf = model.decode_teacher_forced(z, ids)
            _, kl_each = model.kl_to_standard_normal(dist)
            total_nll += float(tf.per_example.sum())
            total_tokens += tf.token_count
            kl_values.extend(kl_each.tolist())
            mus.append(dist.mu.data)
            logvars.append(dist.logvar.data)

    n_mols = len(kl_values)
    mu = np.concatenate(mus)[:cfg.mi_samples]
    logvar = np.concatenate(logvars)[:cfg.mi_samples]
    mi = mutual_information(mu, logvar, rng)
    return MetricsRecord(
        step=step, epoch=epoch, split="valid",
        recon_sum=total_nll / n_mols,
        recon_per_token=total_nll / max(total_tokens, 1),
        kl=float(np.mean(kl_values)),
        mutual_info=mi.mutual_info,
        avg_kl=mi.avg_kl,
        marginal_kl=mi.marginal_kl,
        **weight,
    )


def train(cfg: TrainConfig) -> TrainResult:
    """Run the full loop; returns the trained model and artifact paths."""
    if (cfg.beta is None) == (cfg.alpha is None):
        raise ValueError("configure exactly one of beta and alpha")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.jsonl"
    checkpoint_path = out_dir / "last.ckpt"
    metrics_path.write_text("")

    corpus = load_corpus(cfg.train_path, cfg.max_tokens)
    valid = (load_corpus(cfg.valid_path, cfg.max_tokens, vocab=corpus.vocab)
             if cfg.valid_path else None)

    model = SmilesVae(cfg.model_config(len(corpus.vocab)), seed=cfg.seed)
    optimizer = Adam(model.params, lr=cfg.lr)
    params = list(model.params.values())

    shuffle_rng = np.random.default_rng([cfg.seed, 1])
    eps_rng = np.random.default_rng([cfg.seed, 2])

    steps_per_epoch = math.ceil(len(corpus.sequences) / cfg.batch_size)
    anneal_steps = cfg.anneal_epochs * steps_per_epoch

    history: list[MetricsRecord] = []
    final_valid: MetricsRecord | None = None
    global_step = 0
    start = time.monotonic()

    for epoch in range(cfg.epochs):
        for ids in iterate_batches(corpus.sequences, cfg.batch_size, shuffle_rng):
            if cfg.beta is not None:
                weight = {"beta": anneal_beta(global_step, anneal_steps, cfg.beta)}
            else:
                weight = {"alpha": cfg.alpha}
            zero_grads(params)
            total, breakdown = model.step_loss(ids, eps_rng, **weight)
            total.backward()
            norm = clip_grad_norm(params, cfg.clip_norm)
            try:
                optimizer.step()
            except NonFiniteGradient:
                save_model(checkpoint_path, model, corpus.vocab, global_step,
                           cfg, optimizer)
                raise
            global_step += 1
            if global_step % cfg.log_every == 0 or global_step == 1:
                record = MetricsRecord(
                    step=global_step, epoch=epoch, split="train",
                    recon_sum=breakdown.recon_sum,
                    recon_per_token=breakdown.recon_per_token,
                    kl=breakdown.kl, total=breakdown.total,
                    grad_norm=norm,
                    wall_time=time.monotonic() - start,
                    **weight,
                )
                append_record(metrics_path, record)
                history.append(record)

        eval_rng = np.random.default_rng([cfg.seed, 3, epoch])
        eval_corpus = valid if valid is not None else corpus
        record = _validation_record(model, eval_corpus, cfg, global_step,
                                    epoch, weight, eval_rng)
        append_record(metrics_path, record)
        history.append(record)
        final_valid = record
        save_model(checkpoint_path, model, corpus.vocab, global_step,
                   cfg, optimizer)

    return TrainResult(
        checkpoint_path=checkpoint_path,
        metrics_path=metrics_path,
        model=model,
        vocab=corpus.vocab,
        global_step=global_step,
        wall_time=time.monotonic() - start,
        final_valid=final_valid,
        history=history,
    )
