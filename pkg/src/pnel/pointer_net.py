"""Pointer network over candidate sequences, in plain numpy.

Slot layout of every step distribution: 0 = BEGIN, 1 = END, 2 = PAD,
3 + j = candidate j.  BEGIN and PAD are never valid targets and are masked,
as is every candidate slot past the episode's length.
"""

from __future__ import annotations

import json
import logging
import math
import struct
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .featurizer import CandidateFeature, Episode

log = logging.getLogger(__name__)

BEGIN, END, PAD = 0, 1, 2
N_SPECIAL = 3

CKPT_MAGIC = b"PNCK"
CKPT_VERSION = 1


class CheckpointError(ValueError):
    pass


class ChecksumError(CheckpointError):
    pass


class TruncatedCheckpointError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class ConfigError(ValueError):
    pass


class TrainingError(RuntimeError):
    pass


@dataclass
class ModelConfig:
    input_dim: int = 1142
    hidden: int = 512
    attention_dim: int = 128
    max_input: int = 3000
    n_symbols: int = 3003
    max_output: int = 100
    lr: float = 0.001
    seed: int = 0
    init_scale: float = 0.08
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    # Decoupled (AdamW-style) decay applied to every parameter each step.
    weight_decay: float = 0.0
    # Added to the forget-gate slice of every LSTM bias at initialisation.
    forget_bias: float = 0.0
    # Exclude already-pointed candidates from later steps' softmax.
    mask_pointed: bool = False
    dtype: str = "float32"
    # What the decoder consumes after a pointer step: the pointed candidate's
    # raw input vector ("input") or its bi-LSTM encoding ("encoder").
    decoder_feed: str = "input"

    @property
    def feed_dim(self) -> int:
        return self.input_dim if self.decoder_feed == "input" else 2 * self.hidden

    def __post_init__(self):
        if self.n_symbols != self.max_input + N_SPECIAL:
            raise ConfigError(
                f"n_symbols ({self.n_symbols}) must equal max_input + 3 ({self.max_input + N_SPECIAL})"
            )
        if min(self.input_dim, self.hidden, self.attention_dim, self.max_output) < 1:
            raise ConfigError("dimensions must be positive")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"unsupported dtype {self.dtype!r}")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be non-negative")
        if self.decoder_feed not in ("input", "encoder"):
            raise ConfigError(f"unknown decoder_feed {self.decoder_feed!r}")

    @classmethod
    def small(cls, **overrides) -> "ModelConfig":
        base = dict(input_dim=12, hidden=8, attention_dim=4, max_input=6, n_symbols=9,
                    max_output=8, dtype="float64", init_scale=0.5)
        base.update(overrides)
        return cls(**base)


def param_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    d, h, a, fd = cfg.input_dim, cfg.hidden, cfg.attention_dim, cfg.feed_dim
    shapes: dict[str, tuple[int, ...]] = {}
    for enc in ("enc_fw", "enc_bw"):
        shapes[f"{enc}_Wx"] = (4 * h, d)
        shapes[f"{enc}_Wh"] = (4 * h, h)
        shapes[f"{enc}_b"] = (4 * h,)
    shapes.update(
        dec_Wx=(4 * h, fd),
        dec_Wh=(4 * h, h),
        dec_b=(4 * h,),
        bridge_h_W=(h, 2 * h),
        bridge_h_b=(h,),
        bridge_c_W=(h, 2 * h),
        bridge_c_b=(h,),
        att_W1=(a, 2 * h),
        att_W2=(a, h),
        att_v=(a,),
        special_inputs=(N_SPECIAL, fd),
        special_keys=(N_SPECIAL, 2 * h),
    )
    return shapes


@dataclass
class PointerModel:
    config: ModelConfig
    params: dict[str, np.ndarray]
    adam_m: dict[str, np.ndarray]
    adam_v: dict[str, np.ndarray]
    step: int = 0
    epochs_done: int = 0
    # Fixed per-dimension input standardisation, fitted from training data.
    input_mean: np.ndarray = field(default=None)
    input_std: np.ndarray = field(default=None)

    def __post_init__(self):
        dt = np.dtype(self.config.dtype)
        # One contiguous buffer per group so Adam runs as a few vector ops.
        self.names = list(param_shapes(self.config))
        self.flat_params = self._pack(self.params, dt)
        self.flat_m = self._pack(self.adam_m, dt)
        self.flat_v = self._pack(self.adam_v, dt)
        if self.input_mean is None:
            self.input_mean = np.zeros(self.config.input_dim, dtype=dt)
        if self.input_std is None:
            self.input_std = np.ones(self.config.input_dim, dtype=dt)

    def _pack(self, arrays: dict[str, np.ndarray], dt: np.dtype) -> np.ndarray:
        flat = np.concatenate([np.asarray(arrays[k], dtype=dt).ravel() for k in self.names])
        pos = 0
        for k in self.names:
            n = arrays[k].size
            arrays[k] = flat[pos:pos + n].reshape(arrays[k].shape)
            pos += n
        return flat

    def flatten_grads(self, grads: dict[str, np.ndarray]) -> np.ndarray:
        return np.concatenate([grads[k].ravel() for k in self.names])

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.config.dtype)

    def n_parameters(self) -> int:
        return sum(p.size for p in self.params.values())


def init_model(config: ModelConfig) -> PointerModel:
    rng = np.random.default_rng(config.seed)
    dt = np.dtype(config.dtype)
    params = {}
    for name, shape in param_shapes(config).items():
        params[name] = rng.uniform(-config.init_scale, config.init_scale, size=shape).astype(dt)
    h = config.hidden
    for name in ("enc_fw_b", "enc_bw_b", "dec_b"):
        params[name][h:2 * h] += config.forget_bias
    zeros = {name: np.zeros_like(p) for name, p in params.items()}
    return PointerModel(
        config, params, zeros, {name: np.zeros_like(p) for name, p in params.items()}
    )


def fit_normalization(model: PointerModel, episodes: Sequence[Episode]) -> None:
    """Set the input standardisation from the training candidates.

    Constant dimensions (including ablated spans) keep unit scale.
    """
    mats = [ep.matrix for ep in episodes if len(ep)]
    if not mats:
        return
    allx = np.concatenate(mats).astype(np.float64)
    mean = allx.mean(axis=0)
    std = allx.std(axis=0)
    std[std < 1e-6] = 1.0
    model.input_mean = mean.astype(model.dtype)
    model.input_std = std.astype(model.dtype)


def _sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


# ---------------------------------------------------------------------------
# LSTM primitives.  xp holds the precomputed input projections Wx @ x + b.


def _lstm_step(z, c_prev, h):
    """One cell update; returns (gate activations [i f o g], c, tanh c, h)."""
    act = np.empty_like(z)
    act[:3 * h] = _sigmoid(z[:3 * h])
    act[3 * h:] = np.tanh(z[3 * h:])
    c = act[h:2 * h] * c_prev + act[:h] * act[3 * h:]
    tc = np.tanh(c)
    return act, c, tc, act[2 * h:3 * h] * tc


def _lstm_forward(xp, Wh, h0, c0):
    steps, h = xp.shape[0], h0.shape[0]
    acts = np.empty((steps, 4 * h), dtype=xp.dtype)
    cs = np.empty((steps, h), dtype=xp.dtype)
    tcs = np.empty((steps, h), dtype=xp.dtype)
    hs = np.empty((steps, h), dtype=xp.dtype)
    hp, cp = h0, c0
    for t in range(steps):
        acts[t], cs[t], tcs[t], hs[t] = _lstm_step(xp[t] + Wh @ hp, cp, h)
        hp, cp = hs[t], cs[t]
    return hs, cs, {"acts": acts, "c": cs, "tc": tcs, "h": hs, "h0": h0, "c0": c0}


def _lstm_backward(cache, Wh, dhs, dh_last, dc_last):
    """Returns (dxp, dWh, dh0, dc0) given gradients on every output state and
    on the final (h, c)."""
    acts, tcs, hs = cache["acts"], cache["tc"], cache["h"]
    steps, h = hs.shape
    c_prev = np.vstack([cache["c0"][None], cache["c"][:-1]])
    h_prev = np.vstack([cache["h0"][None], hs[:-1]])
    i, f, o, g = acts[:, :h], acts[:, h:2 * h], acts[:, 2 * h:3 * h], acts[:, 3 * h:]
    # step-independent parts of the gate derivatives
    dsig = acts[:, :3 * h] * (1.0 - acts[:, :3 * h])
    d_ig = np.concatenate([g, c_prev], axis=1) * dsig[:, :2 * h]
    d_o = tcs * dsig[:, 2 * h:]
    d_g = i * (1.0 - g * g)
    d_c = o * (1.0 - tcs * tcs)
    dxp = np.empty((steps, 4 * h), dtype=hs.dtype)
    WhT = Wh.T
    dh_next, dc_next = dh_last, dc_last
    for t in range(steps - 1, -1, -1):
        dh = dhs[t] + dh_next
        dc = dh * d_c[t] + dc_next
        dz = dxp[t]
        dz[:h] = dc * d_ig[t, :h]
        dz[h:2 * h] = dc * d_ig[t, h:]
        dz[2 * h:3 * h] = dh * d_o[t]
        dz[3 * h:] = dc * d_g[t]
        dh_next = WhT @ dz
        dc_next = dc * f[t]
    return dxp, dxp.T @ h_prev, dh_next, dc_next


# ---------------------------------------------------------------------------
# Encoder / decoder


def _normalized(model: PointerModel, matrix: np.ndarray) -> np.ndarray:
    x = np.asarray(matrix, dtype=model.dtype)
    return (x - model.input_mean) / model.input_std


def _encode(model: PointerModel, xn: np.ndarray):
    p = model.params
    h = model.config.hidden
    m = xn.shape[0]
    zero = np.zeros(h, dtype=model.dtype)
    xp_f = xn @ p["enc_fw_Wx"].T + p["enc_fw_b"]
    # reversed views fall off the BLAS fast path; reverse the product instead
    xp_b = (xn @ p["enc_bw_Wx"].T + p["enc_bw_b"])[::-1]
    hf, cf, cache_f = _lstm_forward(xp_f, p["enc_fw_Wh"], zero, zero)
    hb, cb, cache_b = _lstm_forward(xp_b, p["enc_bw_Wh"], zero, zero)
    enc = np.concatenate([hf, hb[::-1]], axis=1) if m else np.zeros((0, 2 * h), model.dtype)
    last_h = np.concatenate([hf[-1], hb[-1]]) if m else np.zeros(2 * h, model.dtype)
    last_c = np.concatenate([cf[-1], cb[-1]]) if m else np.zeros(2 * h, model.dtype)
    dec_h0 = np.tanh(p["bridge_h_W"] @ last_h + p["bridge_h_b"])
    dec_c0 = np.tanh(p["bridge_c_W"] @ last_c + p["bridge_c_b"])
    keys = np.concatenate([p["special_keys"], enc], axis=0)
    key_proj = keys @ p["att_W1"].T
    cache = dict(cache_f=cache_f, cache_b=cache_b, last_h=last_h, last_c=last_c,
                 dec_h0=dec_h0, dec_c0=dec_c0, keys=keys, key_proj=key_proj)
    return dec_h0, dec_c0, key_proj, cache


def _scores(model: PointerModel, key_proj: np.ndarray, d: np.ndarray):
    p = model.params
    z = np.tanh(key_proj + p["att_W2"] @ d)
    u = z @ p["att_v"]
    u[BEGIN] = -np.inf
    u[PAD] = -np.inf
    return u, z


def _log_softmax(u):
    mx = np.max(u)
    shifted = u - mx
    return shifted - np.log(np.sum(np.exp(shifted)))


def _dec_input(model: PointerModel, xn: np.ndarray, enc: np.ndarray, slot: int) -> np.ndarray:
    if slot < N_SPECIAL:
        return model.params["special_inputs"][slot]
    src = xn if model.config.decoder_feed == "input" else enc
    return src[slot - N_SPECIAL]


def _targets(labels: Sequence[int], cfg: ModelConfig) -> list[int]:
    return [int(j) + N_SPECIAL for j in labels[: cfg.max_output]] + [END]


def _loss_and_grads(model: PointerModel, matrix: np.ndarray, labels: Sequence[int],
                    want_grads: bool = True):
    """Teacher-forced mean cross-entropy and its gradient for every parameter."""
    cfg, p = model.config, model.params
    m = matrix.shape[0]
    if m > cfg.max_input:
        raise ValueError(f"episode has {m} candidates, model accepts {cfg.max_input}")
    if not len(labels):
        raise ValueError("empty target sequence; filter unusable episodes first")
    if any(not 0 <= j < m for j in labels):
        raise ValueError("label index outside the candidate sequence")
    xn = _normalized(model, matrix)
    h0, c0, key_proj, enc_cache = _encode(model, xn)
    targets = _targets(labels, cfg)
    steps = len(targets)
    dec_slots = [BEGIN] + targets[:-1]
    enc = enc_cache["keys"][N_SPECIAL:]
    dec_x = np.stack([_dec_input(model, xn, enc, s) for s in dec_slots])
    dec_xp = dec_x @ p["dec_Wx"].T + p["dec_b"]
    ds, _, dec_cache = _lstm_forward(dec_xp, p["dec_Wh"], h0, c0)

    total = 0.0
    probs = []
    for t, tgt in enumerate(targets):
        u, _ = _scores(model, key_proj, ds[t])
        if cfg.mask_pointed and t:
            u[targets[:t]] = -np.inf
        lp = _log_softmax(u)
        total -= float(lp[tgt])
        probs.append(np.exp(lp))
    loss_value = total / steps
    if not want_grads:
        return loss_value, None

    grads = {name: np.zeros_like(v) for name, v in p.items()}
    d_key_proj = np.zeros_like(key_proj)
    d_ds = np.empty_like(ds)
    W2, v = p["att_W2"], p["att_v"]
    for t, tgt in enumerate(targets):
        du = probs[t] / steps
        du[tgt] -= 1.0 / steps
        z = np.tanh(key_proj + W2 @ ds[t])
        grads["att_v"] += z.T @ du
        dz = np.outer(du, v) * (1.0 - z * z)
        d_key_proj += dz
        dq = dz.sum(axis=0)
        grads["att_W2"] += np.outer(dq, ds[t])
        d_ds[t] = W2.T @ dq

    zero_h = np.zeros(cfg.hidden, dtype=model.dtype)
    d_dec_xp, grads["dec_Wh"], d_h0, d_c0 = _lstm_backward(dec_cache, p["dec_Wh"], d_ds, zero_h, zero_h)
    grads["dec_Wx"] = d_dec_xp.T @ dec_x
    grads["dec_b"] = d_dec_xp.sum(axis=0)
    grads["special_inputs"][BEGIN] += p["dec_Wx"].T @ d_dec_xp[0]

    keys = enc_cache["keys"]
    grads["att_W1"] = d_key_proj.T @ keys
    d_keys = d_key_proj @ p["att_W1"]
    grads["special_keys"] = d_keys[:N_SPECIAL].copy()
    d_enc = d_keys[N_SPECIAL:]
    if cfg.decoder_feed == "encoder" and steps > 1:
        d_fed = d_dec_xp[1:] @ p["dec_Wx"]
        np.add.at(d_enc, np.asarray(dec_slots[1:]) - N_SPECIAL, d_fed)

    h = cfg.hidden
    d_pre_h = d_h0 * (1.0 - enc_cache["dec_h0"] ** 2)
    grads["bridge_h_W"] = np.outer(d_pre_h, enc_cache["last_h"])
    grads["bridge_h_b"] = d_pre_h
    d_last_h = p["bridge_h_W"].T @ d_pre_h
    d_pre_c = d_c0 * (1.0 - enc_cache["dec_c0"] ** 2)
    grads["bridge_c_W"] = np.outer(d_pre_c, enc_cache["last_c"])
    grads["bridge_c_b"] = d_pre_c
    d_last_c = p["bridge_c_W"].T @ d_pre_c

    if m:
        dxp_f, grads["enc_fw_Wh"], _, _ = _lstm_backward(
            enc_cache["cache_f"], p["enc_fw_Wh"], d_enc[:, :h], d_last_h[:h], d_last_c[:h])
        grads["enc_fw_Wx"] = dxp_f.T @ xn
        grads["enc_fw_b"] = dxp_f.sum(axis=0)
        dxp_b, grads["enc_bw_Wh"], _, _ = _lstm_backward(
            enc_cache["cache_b"], p["enc_bw_Wh"], d_enc[::-1, h:], d_last_h[h:], d_last_c[h:])
        dxp_b = np.ascontiguousarray(dxp_b[::-1])
        grads["enc_bw_Wx"] = dxp_b.T @ xn
        grads["enc_bw_b"] = dxp_b.sum(axis=0)
    return loss_value, grads


# ---------------------------------------------------------------------------
# Public operations


@dataclass
class StepDistribution:
    logits: np.ndarray

    @property
    def probs(self) -> np.ndarray:
        return np.exp(_log_softmax(self.logits.astype(np.float64)))

    def log_prob(self, slot: int) -> float:
        return float(_log_softmax(self.logits.astype(np.float64))[slot])

    def argmax(self) -> int:
        return int(np.argmax(self.logits))


def _full_logits(cfg: ModelConfig, u: np.ndarray) -> np.ndarray:
    out = np.full(cfg.n_symbols, -np.inf, dtype=np.float64)
    out[: u.shape[0]] = u
    return out


def forward(model: PointerModel, episode: Episode,
            teacher_labels: Sequence[int] | None = None) -> list[StepDistribution]:
    """Step distributions: teacher-forced when labels are given, greedy otherwise."""
    cfg, p = model.config, model.params
    if len(episode) > cfg.max_input:
        raise ValueError(f"episode has {len(episode)} candidates, model accepts {cfg.max_input}")
    xn = _normalized(model, episode.matrix)
    h, c, key_proj, enc_cache = _encode(model, xn)
    enc = enc_cache["keys"][N_SPECIAL:]
    out = []
    prev = BEGIN
    seen: set[int] = set()
    pointed: list[int] = []
    limit = len(teacher_labels) + 1 if teacher_labels is not None else cfg.max_output
    for t in range(limit):
        z = _dec_input(model, xn, enc, prev) @ p["dec_Wx"].T + p["dec_b"] + p["dec_Wh"] @ h
        _, c, _, h = _lstm_step(z, c, cfg.hidden)
        u, _ = _scores(model, key_proj, h)
        if cfg.mask_pointed and pointed:
            u[pointed] = -np.inf
        out.append(StepDistribution(_full_logits(cfg, u)))
        if teacher_labels is not None:
            prev = END if t == len(teacher_labels) else int(teacher_labels[t]) + N_SPECIAL
            pointed.append(prev)
            continue
        prev = int(np.argmax(u))
        if prev == END or prev in seen:
            break
        seen.add(prev)
        pointed.append(prev)
    return out


def loss(distributions: Sequence[StepDistribution], gold_label_indices: Sequence[int]) -> float:
    """Mean negative log-likelihood of gold positions followed by END."""
    if not len(gold_label_indices):
        raise ValueError("empty target sequence; filter unusable episodes first")
    targets = [int(j) + N_SPECIAL for j in gold_label_indices] + [END]
    if len(distributions) != len(targets):
        raise ValueError(f"{len(distributions)} distributions for {len(targets)} targets")
    return -sum(d.log_prob(t) for d, t in zip(distributions, targets)) / len(targets)


def decode(model: PointerModel, episode: Episode) -> list[int]:
    """Greedy pointer decode; returns the pointed candidate positions in order."""
    dists = forward(model, episode)
    positions: list[int] = []
    for d in dists:
        slot = d.argmax()
        if slot == END or slot - N_SPECIAL in positions:
            break
        positions.append(slot - N_SPECIAL)
    return positions


def link(model: PointerModel, episode: Episode) -> set[str]:
    return {episode.candidates[j].entity_id for j in decode(model, episode)}


def _adam_update(model: PointerModel, g: np.ndarray) -> None:
    cfg = model.config
    model.step += 1
    b1, b2 = cfg.beta1, cfg.beta2
    corr1 = 1.0 - b1 ** model.step
    corr2 = 1.0 - b2 ** model.step
    m, v = model.flat_m, model.flat_v
    m *= b1
    m += (1.0 - b1) * g
    v *= b2
    v += (1.0 - b2) * (g * g)
    denom = np.sqrt(v / corr2)
    denom += cfg.adam_eps
    if cfg.weight_decay:
        model.flat_params *= 1.0 - cfg.lr * cfg.weight_decay
    model.flat_params -= cfg.lr * (m / corr1) / denom


@dataclass
class TrainHistory:
    epoch_loss: list[float] = field(default_factory=list)


def train(model: PointerModel, episodes: Sequence[Episode], epochs: int,
          on_epoch: Callable[[int, float], bool | None] | None = None) -> tuple[PointerModel, TrainHistory]:
    """Per-episode Adam updates. ``on_epoch(epoch, mean_loss)`` may return True to stop early."""
    usable = [ep for ep in episodes if ep.usable and ep.gold_label_indices]
    if len(usable) != len(episodes):
        raise ValueError("train() needs usable episodes only")
    history = TrainHistory()
    for _ in range(epochs):
        epoch = model.epochs_done
        order = np.random.default_rng([model.config.seed, 1, epoch]).permutation(len(usable))
        total = 0.0
        for idx in order:
            ep = usable[idx]
            value, grads = _loss_and_grads(model, ep.matrix, ep.gold_label_indices)
            g = model.flatten_grads(grads)
            sq = float(np.vdot(g, g))
            if not (math.isfinite(value) and math.isfinite(sq)):
                raise TrainingError(
                    f"non-finite loss/gradient at epoch {epoch}, episode {ep.qid or idx!r} "
                    f"(loss={value}, grad_sq_norm={sq}, step={model.step})"
                )
            _adam_update(model, g)
            total += value
        model.epochs_done += 1
        mean_loss = total / max(1, len(usable))
        history.epoch_loss.append(mean_loss)
        log.info("epoch %d: mean loss %.6f", epoch + 1, mean_loss)
        if on_epoch is not None and on_epoch(epoch, mean_loss):
            break
    return model, history


# ---------------------------------------------------------------------------
# Gradient verification


def make_episode(matrix: np.ndarray, labels: Sequence[int] = (), entity_ids: Sequence[str] | None = None) -> Episode:
    """Wrap a raw candidate matrix as an episode (synthetic tasks, tests)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    ids = list(entity_ids) if entity_ids is not None else [f"c{j}" for j in range(len(matrix))]
    cands = [CandidateFeature(ids[j], j, 1, 1, "", matrix[j]) for j in range(len(matrix))]
    ep = Episode(question="", tokens=[], candidates=cands, _matrix=matrix)
    ep.gold_label_indices = sorted(int(j) for j in labels)
    ep.gold_entity_ids = frozenset(ids[j] for j in ep.gold_label_indices)
    ep.usable = bool(ep.gold_label_indices)
    return ep


def grad_check(config_small: ModelConfig, episode_small: Episode, eps: float = 1e-4,
               corrupt: Callable[[dict[str, np.ndarray]], None] | None = None,
               model: PointerModel | None = None) -> float:
    """Max relative error between analytic and central-difference gradients,
    over every entry of every parameter. ``corrupt`` may mutate the analytic
    gradients before comparison (mutation testing)."""
    if config_small.dtype != "float64":
        config_small = ModelConfig(**{**asdict(config_small), "dtype": "float64"})
    if model is None:
        model = init_model(config_small)
    matrix = episode_small.matrix
    labels = episode_small.gold_label_indices
    _, grads = _loss_and_grads(model, matrix, labels)
    if corrupt is not None:
        corrupt(grads)
    worst = 0.0
    for name, param in model.params.items():
        flat = param.reshape(-1)
        g_a = grads[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            plus, _ = _loss_and_grads(model, matrix, labels, want_grads=False)
            flat[i] = orig - eps
            minus, _ = _loss_and_grads(model, matrix, labels, want_grads=False)
            flat[i] = orig
            g_n = (plus - minus) / (2.0 * eps)
            rel = abs(g_a[i] - g_n) / max(1e-8, abs(g_a[i]) + abs(g_n))
            worst = max(worst, rel)
    return worst


# ---------------------------------------------------------------------------
# Checkpoints: "PNCK", u32 version, u64 total length, u32 header length,
# JSON header, named little-endian blobs, trailing CRC32 of all prior bytes.


def _blobs(model: PointerModel) -> list[tuple[str, np.ndarray]]:
    items = list(model.params.items())
    items += [(f"adam_m/{k}", v) for k, v in model.adam_m.items()]
    items += [(f"adam_v/{k}", v) for k, v in model.adam_v.items()]
    items += [("input_mean", model.input_mean), ("input_std", model.input_std)]
    return items


def save_checkpoint(model: PointerModel, path: str | Path) -> None:
    header = json.dumps(
        {"config": asdict(model.config), "step": model.step, "epochs_done": model.epochs_done},
        sort_keys=True,
    ).encode("utf-8")
    le = model.dtype.newbyteorder("<")
    body = bytearray()
    body += struct.pack("<I", len(header)) + header
    for name, arr in _blobs(model):
        raw = name.encode("utf-8")
        body += struct.pack("<HB", len(raw), arr.ndim) + raw
        body += struct.pack(f"<{arr.ndim}I", *arr.shape)
        body += np.ascontiguousarray(arr, dtype=le).tobytes()
    total = 4 + 4 + 8 + len(body) + 4
    data = CKPT_MAGIC + struct.pack("<IQ", CKPT_VERSION, total) + bytes(body)
    data += struct.pack("<I", zlib.crc32(data) & 0xFFFFFFFF)
    Path(path).write_bytes(data)


def load_checkpoint(path: str | Path, input_dim: int | None = None) -> PointerModel:
    data = Path(path).read_bytes()
    if len(data) < 20:
        raise TruncatedCheckpointError(f"{path}: file too short")
    if data[:4] != CKPT_MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    version, total = struct.unpack_from("<IQ", data, 4)
    if version != CKPT_VERSION:
        raise VersionMismatchError(f"{path}: checkpoint version {version}, expected {CKPT_VERSION}")
    if len(data) < total:
        raise TruncatedCheckpointError(f"{path}: {len(data)} bytes, header says {total}")
    (crc,) = struct.unpack_from("<I", data, total - 4)
    if zlib.crc32(data[: total - 4]) & 0xFFFFFFFF != crc:
        raise ChecksumError(f"{path}: CRC32 mismatch")
    try:
        pos = 16
        (hlen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        header = json.loads(data[pos:pos + hlen])
        pos += hlen
        config = ModelConfig(**header["config"])
        le = np.dtype(config.dtype).newbyteorder("<")
        blobs = {}
        while pos < total - 4:
            nlen, ndim = struct.unpack_from("<HB", data, pos)
            pos += 3
            name = data[pos:pos + nlen].decode("utf-8")
            pos += nlen
            shape = struct.unpack_from(f"<{ndim}I", data, pos)
            pos += 4 * ndim
            count = int(np.prod(shape)) if ndim else 1
            arr = np.frombuffer(data, dtype=le, count=count, offset=pos).reshape(shape)
            pos += count * le.itemsize
            blobs[name] = arr.astype(config.dtype)
    except (struct.error, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"{path}: malformed checkpoint: {exc}") from exc
    if input_dim is not None and config.input_dim != input_dim:
        raise ConfigError(f"checkpoint expects input_dim {config.input_dim}, features have {input_dim}")
    shapes = param_shapes(config)
    try:
        params = {k: blobs[k] for k in shapes}
        model = PointerModel(
            config,
            params,
            {k: blobs[f"adam_m/{k}"] for k in shapes},
            {k: blobs[f"adam_v/{k}"] for k in shapes},
            step=int(header["step"]),
            epochs_done=int(header["epochs_done"]),
            input_mean=blobs["input_mean"],
            input_std=blobs["input_std"],
        )
    except KeyError as exc:
        raise CheckpointError(f"{path}: missing blob {exc}") from exc
    for k, shape in shapes.items():
        if params[k].shape != shape:
            raise ConfigError(f"{path}: parameter {k} has shape {params[k].shape}, config implies {shape}")
    return model
