"""Deep-network landscape surrogate: two fixed feed-forward architectures,
mini-batch training with validation-correlation early stopping, and exact
reverse-mode gradients with respect to the inputs."""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .core import BudgetAccountant, EvaluatedSample, SamplePool, ScalingConfig, \
    evaluate_candidate, scale_scores

# architecture name -> (hidden layers, units per layer, dense skip wiring)
ARCHITECTURES = {
    "deep5": (5, 100, False),
    "deep10": (10, 20, True),
}

SNAPSHOT_MAGIC = b"DOPTNET1"


class ModelFrozenError(RuntimeError):
    """Raised when an operation conflicts with the model's frozen state."""


@dataclass
class NetworkSpec:
    architecture: str
    input_dim: int

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")

    @property
    def hidden_layers(self) -> int:
        return ARCHITECTURES[self.architecture][0]

    @property
    def hidden_units(self) -> int:
        return ARCHITECTURES[self.architecture][1]

    @property
    def dense_skips(self) -> bool:
        """With skips, layer k consumes the raw input concatenated with
        every previous layer's activations."""
        return ARCHITECTURES[self.architecture][2]

    def layer_input_dims(self) -> list[int]:
        """Input width of each hidden layer plus the output layer."""
        d, u = self.input_dim, self.hidden_units
        if self.dense_skips:
            return [d + k * u for k in range(self.hidden_layers + 1)]
        return [d] + [u] * self.hidden_layers


class Adam:
    """Adaptive-moment estimation over a list of parameter arrays."""

    def __init__(self, shapes, learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, grads) -> list[np.ndarray]:
        """Consume gradients and return the update to subtract per parameter."""
        self.t += 1
        scale = self.learning_rate * np.sqrt(1.0 - self.beta2 ** self.t) / (1.0 - self.beta1 ** self.t)
        updates = []
        for i, g in enumerate(grads):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            updates.append(scale * self.m[i] / (np.sqrt(self.v[i]) + self.eps))
        return updates


class LandscapeModel:
    """Maps a genotype to a predicted scaled score in (0, 1).

    Hidden units are rectifiers; the single output unit is a sigmoid so
    predictions stay in the scaled-target range.  A frozen model rejects
    any weight update but can be read concurrently.
    """

    def __init__(self, architecture: str, input_dim: int,
                 rng: np.random.Generator | None = None,
                 learning_rate: float = 1e-3):
        self.spec = NetworkSpec(architecture, input_dim)
        self.learning_rate = learning_rate
        self.frozen = False
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        self._single32 = None
        self.reinitialize(rng if rng is not None else np.random.default_rng(0))

    # -- construction ------------------------------------------------------

    def reinitialize(self, rng: np.random.Generator) -> None:
        """Fresh random weights (He init for rectifier layers) and a fresh
        optimizer state."""
        if self.frozen:
            raise ModelFrozenError("cannot reinitialize a frozen model")
        dims = self.spec.layer_input_dims()
        units = self.spec.hidden_units
        self.weights = []
        self.biases = []
        for k in range(self.spec.hidden_layers):
            fan_in = dims[k]
            self.weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, units)))
            self.biases.append(np.zeros(units))
        out_in = dims[-1]
        self.weights.append(rng.normal(0.0, 1.0 / np.sqrt(out_in), size=(out_in, 1)))
        self.biases.append(np.zeros(1))
        self._adam = Adam([w.shape for w in self.weights] + [b.shape for b in self.biases],
                          learning_rate=self.learning_rate)

    # -- forward / backward ------------------------------------------------

    def _layer_input(self, acts: list[np.ndarray], k: int) -> np.ndarray:
        if self.spec.dense_skips:
            return acts[0] if k == 0 else np.concatenate(acts[:k + 1], axis=1)
        return acts[k]

    def _forward_full(self, X: np.ndarray, params=None):
        weights, biases = params if params is not None else (self.weights, self.biases)
        if params is None:
            X = np.asarray(X, dtype=np.float64)
        acts = [X]
        zs = []
        for k in range(self.spec.hidden_layers):
            z = self._layer_input(acts, k) @ weights[k] + biases[k]
            zs.append(z)
            acts.append(np.maximum(z, 0.0))
        z_out = self._layer_input(acts, self.spec.hidden_layers) @ weights[-1] + biases[-1]
        pred = expit(z_out[:, 0])
        return pred, acts, zs

    def _backward(self, acts, zs, g_out: np.ndarray, need_weights: bool = True,
                  params=None):
        """Reverse pass from g_out = dLoss/d(pre-sigmoid output), shape (n, 1).

        Returns (weight grads, bias grads, input grads); weight/bias grads
        are None when not requested.
        """
        weights = params[0] if params is not None else self.weights
        n_hidden = self.spec.hidden_layers
        d = self.spec.input_dim
        u = self.spec.hidden_units
        w_grads = [None] * (n_hidden + 1)
        b_grads = [None] * (n_hidden + 1)

        if need_weights:
            inp = self._layer_input(acts, n_hidden)
            w_grads[-1] = inp.T @ g_out
            b_grads[-1] = g_out.sum(axis=0)

        if not self.spec.dense_skips:
            # plain chain: carry one running activation gradient
            d_act = g_out @ weights[-1].T
            for k in range(n_hidden - 1, -1, -1):
                dz = d_act * (zs[k] > 0.0)
                if need_weights:
                    w_grads[k] = acts[k].T @ dz
                    b_grads[k] = dz.sum(axis=0)
                d_act = dz @ weights[k].T
            return w_grads, b_grads, d_act

        act_grads = [np.zeros_like(a) for a in acts]

        def scatter(d_inp, upto):
            # route gradient of a concatenated input back onto its segments
            act_grads[0] += d_inp[:, :d]
            for j in range(1, upto + 1):
                act_grads[j] += d_inp[:, d + (j - 1) * u: d + j * u]

        scatter(g_out @ weights[-1].T, n_hidden)
        for k in range(n_hidden - 1, -1, -1):
            dz = act_grads[k + 1] * (zs[k] > 0.0)
            if need_weights:
                inp = self._layer_input(acts, k)
                w_grads[k] = inp.T @ dz
                b_grads[k] = dz.sum(axis=0)
            if k == 0:
                act_grads[0] += dz @ weights[0].T
            else:
                scatter(dz @ weights[k].T, k)
        return w_grads, b_grads, act_grads[0]

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Predicted scores for a batch of genotypes, shape (n,)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.spec.input_dim:
            raise ValueError(f"expected inputs of width {self.spec.input_dim}, got {X.shape[1]}")
        return self._forward_full(X)[0]

    def _frozen_single32(self):
        """Single-precision weight copies for the inversion hot loop; only
        valid while frozen (unfreezing invalidates the cache)."""
        if not self.frozen:
            raise ModelFrozenError("single-precision kernel requires a frozen model")
        if self._single32 is None:
            self._single32 = ([w.astype(np.float32) for w in self.weights],
                              [b.astype(np.float32) for b in self.biases])
        return self._single32

    def forward_one(self, x) -> float:
        return float(self.forward(np.asarray(x).reshape(1, -1))[0])

    # -- inversion support ---------------------------------------------------

    def input_gradients(self, X: np.ndarray, single_precision: bool = False):
        """d E_LMS / d inputs for the clamped target 1.0, plus predictions.

        E_LMS = (1 - predicted)^2 per row.  Requires a frozen model: this
        guards the generator against accidental weight updates.  The
        single-precision kernel serves the inversion hot loop.
        """
        if not self.frozen:
            raise ModelFrozenError("input gradients require a frozen model")
        params = None
        if single_precision:
            params = self._frozen_single32()
            X = np.atleast_2d(np.asarray(X, dtype=np.float32))
        else:
            X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        pred, acts, zs = self._forward_full(X, params)
        g_out = (-2.0 * (1.0 - pred) * pred * (1.0 - pred))[:, None]
        _, _, d_input = self._backward(acts, zs, g_out, need_weights=False, params=params)
        return d_input, pred

    def input_gradient(self, x) -> np.ndarray:
        grads, _ = self.input_gradients(np.asarray(x).reshape(1, -1))
        return grads[0]

    # -- training ------------------------------------------------------------

    def loss_on(self, X: np.ndarray, y: np.ndarray) -> float:
        err = self.forward(X) - np.asarray(y, dtype=np.float64)
        return float(np.mean(err * err))

    def train_epoch(self, X: np.ndarray, y: np.ndarray, batch_size: int,
                    rng: np.random.Generator, weight_decay: float = 1.0) -> float:
        """One shuffled pass of mini-batch squared-loss regression; the
        multiplicative weight decay is applied once at the end of the epoch.
        Returns the mean pre-update batch loss."""
        if self.frozen:
            raise ModelFrozenError("cannot train a frozen model")
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n = X.shape[0]
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            pred, acts, zs = self._forward_full(X[idx])
            err = pred - y[idx]
            total += float(np.sum(err * err))
            g_out = ((2.0 / idx.size) * err * pred * (1.0 - pred))[:, None]
            w_grads, b_grads, _ = self._backward(acts, zs, g_out)
            updates = self._adam.step(w_grads + b_grads)
            n_params = len(self.weights)
            for i in range(n_params):
                self.weights[i] -= updates[i]
                self.biases[i] -= updates[n_params + i]
        if weight_decay != 1.0:
            for w in self.weights:
                w *= weight_decay
        return total / n

    # -- state ---------------------------------------------------------------

    def freeze(self) -> None:
        self.frozen = True

    def unfreeze(self) -> None:
        self.frozen = False
        self._single32 = None

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for w, b in zip(self.weights, self.biases):
            digest.update(w.tobytes())
            digest.update(b.tobytes())
        return digest.hexdigest()

    def save(self, path) -> None:
        """Versioned binary snapshot: layer shapes plus row-major float64
        weights.  Debugging/reproducibility aid only."""
        arch = self.spec.architecture.encode()
        parts = [SNAPSHOT_MAGIC, struct.pack("<B", len(arch)), arch,
                 struct.pack("<II", self.spec.input_dim, len(self.weights))]
        for w, b in zip(self.weights, self.biases):
            parts.append(struct.pack("<II", *w.shape))
            parts.append(np.ascontiguousarray(w).tobytes())
            parts.append(np.ascontiguousarray(b).tobytes())
        with open(path, "wb") as fh:
            fh.write(b"".join(parts))

    @classmethod
    def load(cls, path) -> "LandscapeModel":
        with open(path, "rb") as fh:
            data = fh.read()
        if data[:8] != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a model snapshot")
        pos = 8
        (arch_len,) = struct.unpack_from("<B", data, pos); pos += 1
        arch = data[pos:pos + arch_len].decode(); pos += arch_len
        input_dim, n_layers = struct.unpack_from("<II", data, pos); pos += 8
        model = cls(arch, input_dim)
        for k in range(n_layers):
            rows, cols = struct.unpack_from("<II", data, pos); pos += 8
            size = rows * cols * 8
            model.weights[k] = np.frombuffer(data[pos:pos + size]).reshape(rows, cols).copy()
            pos += size
            model.biases[k] = np.frombuffer(data[pos:pos + cols * 8]).copy()
            pos += cols * 8
        return model


@dataclass
class TrainConfig:
    """Per-cycle training knobs.

    Training stops when the validation correlation has dropped more than
    `correlation_drop` below its running maximum for `correlation_patience`
    consecutive epochs; a negative first correlation triggers a weight
    reinitialization (at most `max_restarts` per cycle).
    """

    weight_decay_factor: float = 0.98
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 200
    min_epochs: int = 3
    validation_size: int = 100
    validation_perturbation_scale: float = 0.05
    correlation_drop: float = 0.01
    correlation_patience: int = 3
    max_restarts: int = 3

    def __post_init__(self):
        for name in ("weight_decay_factor", "learning_rate", "batch_size", "max_epochs",
                     "validation_size", "correlation_patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.validation_size < 2:
            raise ValueError("validation_size must be at least 2 (correlation needs 2 points)")


@dataclass
class ValidationSet:
    X: np.ndarray
    true_scores: np.ndarray


@dataclass
class TrainReport:
    epochs: int
    restarts: int
    correlations: list[float] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    stop_reason: str = "max-epochs"
    validation: ValidationSet | None = None


def pearson(a: np.ndarray, b: np.ndarray) -> tuple[float, bool]:
    """(correlation, defined).  Degenerate inputs (fewer than 2 points or a
    constant side) report (0.0, False)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or float(np.std(a)) == 0.0 or float(np.std(b)) == 0.0:
        return 0.0, False
    return float(np.corrcoef(a, b)[0, 1]), True


def draw_validation(best: EvaluatedSample, problem, budget: BudgetAccountant,
                    cfg: TrainConfig, rng: np.random.Generator,
                    discrete: bool = False) -> ValidationSet | None:
    """Fresh validation samples: perturbations of the best solution, truly
    evaluated (budget-charged).  None when the budget cannot cover them.

    On binary encodings additive jitter cannot cross the decode threshold
    (every perturbed sample would score identically, leaving the
    correlation undefined), so discrete mode perturbs by flipping each gene
    with the same scale used as a probability.
    """
    if not budget.can_afford(cfg.validation_size):
        return None
    rows = []
    scores = []
    for _ in range(cfg.validation_size):
        if discrete:
            flips = rng.random(best.values.size) < cfg.validation_perturbation_scale
            values = np.where(flips, 1.0 - best.values, best.values)
        else:
            jitter = rng.uniform(-cfg.validation_perturbation_scale,
                                 cfg.validation_perturbation_scale, size=best.values.size)
            values = np.clip(best.values + jitter, 0.0, 1.0)
        sample = evaluate_candidate(problem, values, budget, rng, "validation")
        rows.append(sample.values)
        scores.append(sample.raw_score)
    return ValidationSet(X=np.stack(rows), true_scores=np.array(scores))


def train_cycle(model: LandscapeModel, pool: SamplePool, scaling: ScalingConfig,
                best: EvaluatedSample, problem, budget: BudgetAccountant,
                cfg: TrainConfig, rng: np.random.Generator,
                prev_validation: ValidationSet | None = None,
                discrete: bool = False) -> TrainReport:
    """One training session: regress the network onto pool-scaled scores,
    stopping on the validation-correlation rule.  Weights persist across
    cycles; they are reinitialized only by the negative-correlation rule."""
    if len(pool) == 0:
        raise ValueError("cannot train on an empty pool")
    X, _ = pool.as_arrays()
    y = scale_scores(pool, scaling)
    validation = draw_validation(best, problem, budget, cfg, rng, discrete) or prev_validation

    report = TrainReport(epochs=0, restarts=0, validation=validation)
    best_corr = -np.inf
    drops = 0
    epoch_in_attempt = 0
    any_defined = False
    while report.epochs < cfg.max_epochs:
        loss = model.train_epoch(X, y, cfg.batch_size, rng,
                                 weight_decay=cfg.weight_decay_factor)
        report.epochs += 1
        epoch_in_attempt += 1
        report.losses.append(loss)
        if validation is not None:
            corr, defined = pearson(model.forward(validation.X), validation.true_scores)
        else:
            corr, defined = 0.0, False
        report.correlations.append(corr)
        any_defined = any_defined or defined

        if epoch_in_attempt == 1 and defined and corr < 0.0 and report.restarts < cfg.max_restarts:
            model.reinitialize(rng)
            report.restarts += 1
            epoch_in_attempt = 0
            best_corr = -np.inf
            drops = 0
            continue
        if not any_defined and epoch_in_attempt >= cfg.min_epochs:
            report.stop_reason = "degenerate-validation"
            break
        if corr < best_corr - cfg.correlation_drop:
            drops += 1
            if drops >= cfg.correlation_patience:
                report.stop_reason = "correlation-decrease"
                break
        else:
            drops = 0
        best_corr = max(best_corr, corr)
    return report
