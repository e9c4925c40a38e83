""" Mini-batch training with early stopping for Inception Networks. """
from contextlib import nullcontext
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_softmax, softmax
from sklearn.model_selection import train_test_split
import stopit

from pprnet.errors import InsufficientDataError, NumericalError, SingleClassError
from pprnet.logging import MACHINE_LOG_LEVEL
from pprnet.logging.trace_logger import EpochRecord, TraceLogger
from pprnet.networks.inception import InceptionArchitecture, InceptionNetwork
from pprnet.networks.optimizer import Adam
from pprnet.utilities.generic.stopwatch import Stopwatch

log = logging.getLogger(__name__)
# Avoid stopit from logging warnings every time training runs out of time.
logging.getLogger("stopit").setLevel(logging.ERROR)

SOURCE_DEFAULTS = dict(
    learning_rate=1e-3,
    batch_size=64,
    max_epochs=100,
    patience=10,
    validation_fraction=0.1,
    max_train_time_s=None,
)
TUNING_DEFAULTS = dict(
    SOURCE_DEFAULTS, learning_rate=1e-4, batch_size=32, max_epochs=50
)


class TrainingHyperparameters:
    """Training settings, each either set explicitly or left to its default."""

    def __init__(
        self,
        learning_rate: Optional[float] = None,
        batch_size: Optional[int] = None,
        max_epochs: Optional[int] = None,
        patience: Optional[int] = None,
        validation_fraction: Optional[float] = None,
        max_train_time_s: Optional[float] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ):
        """

        Parameters
        ----------
        learning_rate: float, optional
            Adam step size, default 1e-3 (1e-4 for tuning).
        batch_size: int, optional
            Windows per mini-batch, default 64 (32 for tuning).
        max_epochs: int, optional
            Upper bound on passes over the data, default 100 (50 for tuning).
        patience: int, optional (default=10)
            Epochs without improvement of the validation loss before stopping.
        validation_fraction: float, optional (default=0.1)
            Stratified share of the data held out for early stopping.
            Without a usable validation split the training loss is monitored.
        max_train_time_s: float, optional (default=None)
            Wall-clock budget. On timeout the best parameters so far are kept.
        defaults: Dict[str, Any], optional (default=None)
            Default values, `SOURCE_DEFAULTS` if None.
        """
        defaults = SOURCE_DEFAULTS if defaults is None else defaults
        self._hyperparameters: Dict[str, Tuple[Any, Any]] = dict(
            learning_rate=(learning_rate, defaults["learning_rate"]),
            batch_size=(batch_size, defaults["batch_size"]),
            max_epochs=(max_epochs, defaults["max_epochs"]),
            patience=(patience, defaults["patience"]),
            validation_fraction=(validation_fraction, defaults["validation_fraction"]),
            max_train_time_s=(max_train_time_s, defaults["max_train_time_s"]),
        )
        hp = self.hyperparameters
        if hp["batch_size"] < 1:
            raise ValueError(f"batch_size must be at least 1, is {hp['batch_size']}.")
        if hp["max_epochs"] < 0:
            raise ValueError(f"max_epochs must be non-negative, is {hp['max_epochs']}.")
        if not 0.0 <= hp["validation_fraction"] < 1.0:
            raise ValueError(
                "validation_fraction must be in [0, 1), "
                f"is {hp['validation_fraction']}."
            )

    @classmethod
    def for_tuning(cls, **set_values) -> "TrainingHyperparameters":
        return cls(defaults=TUNING_DEFAULTS, **set_values)

    @property
    def hyperparameters(self) -> Dict[str, Any]:
        """Hyperparameter (name, value) pairs, set values take precedence."""
        return {
            parameter: set_value if set_value is not None else default
            for parameter, (set_value, default) in self._hyperparameters.items()
        }

    def __str__(self) -> str:
        user_set = ",".join(
            f"{name}={value}"
            for name, (value, _) in self._hyperparameters.items()
            if value is not None
        )
        return f"{self.__class__.__name__}({user_set})"


def loss_and_gradient(
    net: InceptionNetwork, logits: np.ndarray, y: np.ndarray
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy, its gradient w.r.t. the logits and the predicted labels."""
    n = len(y)
    if net.uses_sigmoid:
        z = logits[:, 0]
        loss = float(np.mean(np.logaddexp(0, z) - y * z))
        dlogits = ((expit(z) - y) / n)[:, None]
        predicted = (z >= 0).astype(int)
    else:
        loss = float(-np.mean(log_softmax(logits, axis=1)[np.arange(n), y]))
        dlogits = softmax(logits, axis=1)
        dlogits[np.arange(n), y] -= 1
        dlogits /= n
        predicted = (logits[:, 1] >= logits[:, 0]).astype(int)
    return loss, dlogits.astype(logits.dtype, copy=False), predicted


def backward_and_step(
    net: InceptionNetwork, x: np.ndarray, y: np.ndarray, optimizer: Adam
) -> Tuple[float, np.ndarray]:
    """One Adam step on a batch; returns the batch loss and predicted labels.

    Raises
    ------
    NumericalError
        If the loss is not finite, before any parameter is changed.
    """
    if len(y) == 0:
        raise InsufficientDataError("Can not take a training step on an empty batch.")
    logits = net.forward(x, training=True)
    loss, dlogits, predicted = loss_and_gradient(net, logits, np.asarray(y))
    if not np.isfinite(loss):
        raise NumericalError(f"Loss is {loss} on a batch of {len(y)} windows.")
    net.backward(dlogits)
    optimizer.step(net)
    return loss, predicted


def evaluate_loss(net: InceptionNetwork, x: np.ndarray, y: np.ndarray) -> float:
    proba = net.predict_proba(x)[np.arange(len(y)), y]
    return float(-np.mean(np.log(np.clip(proba, 1e-12, None))))


def check_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y).astype(int)
    if len(y) == 0:
        raise InsufficientDataError("Can not train on an empty dataset.")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError(f"Labels must be 0 (normal) or 1 (anomaly): {np.unique(y)}.")
    if len(np.unique(y)) < 2:
        raise SingleClassError(
            f"Training data holds only label {int(y[0])}, both labels are required."
        )
    return y


def _validation_split(
    y: np.ndarray, fraction: float, seed: int
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    indices = np.arange(len(y))
    n_validation = int(len(y) * fraction)
    if n_validation < 2 or np.bincount(y).min() < 2 or len(y) - n_validation < 2:
        return indices, None
    train, validation = train_test_split(
        indices, test_size=n_validation, stratify=y, random_state=seed
    )
    return np.sort(train), np.sort(validation)


def train_network(
    x: np.ndarray,
    y: np.ndarray,
    hyperparameters: Optional[TrainingHyperparameters] = None,
    seed: int = 0,
    network: Optional[InceptionNetwork] = None,
    architecture: InceptionArchitecture = InceptionArchitecture(),
    dtype=np.float32,
    name: str = "IN",
    trace: Optional[TraceLogger] = None,
) -> InceptionNetwork:
    """Train a (new) Inception Network on windows `x` with labels `y`.

    Parameters
    ----------
    x: np.ndarray
        Windows of shape [N, channels, samples].
    y: np.ndarray
        Label index per window, 0 normal and 1 anomaly.
    hyperparameters: TrainingHyperparameters, optional (default=None)
        If None, the source-training defaults.
    seed: int (default=0)
        Determines initialization (of a new network), validation split and batches.
    network: InceptionNetwork, optional (default=None)
        Continue training this network, e.g. after transfer, instead of a new one.
        Frozen layers are left untouched.
    architecture: InceptionArchitecture
        Architecture of a new network.
    dtype: numpy dtype (default=np.float32)
        Arithmetic of a new network.
    name: str (default='IN')
        Name of the network in the log and trace.
    trace: TraceLogger, optional (default=None)
        Receives one record per epoch.

    Returns
    -------
    InceptionNetwork
        With the parameters of the epoch with the lowest monitored loss.
        Its `history` holds the epoch records.

    Raises
    ------
    SingleClassError
        If `y` holds one label only.
    NumericalError
        If the loss becomes NaN or infinite.
    """
    y = check_labels(y)
    if len(x) != len(y):
        raise ValueError(f"{len(x)} windows but {len(y)} labels.")
    hp = (hyperparameters or TrainingHyperparameters()).hyperparameters
    if network is None:
        network = InceptionNetwork(x.shape[1:], architecture, 2, seed, dtype)
    x = network.check_input(x)

    train, validation = _validation_split(y, hp["validation_fraction"], seed)
    optimizer = Adam(hp["learning_rate"])
    rng = np.random.default_rng(seed)
    initial_state = {k: v.copy() for k, v in network.state().items()}
    best_state: Optional[Dict[str, np.ndarray]] = None
    best_loss, last_loss, waited = np.inf, np.nan, 0
    history: List[EpochRecord] = []

    log.debug(f"Training {name} on {len(train)} windows, seed {seed}, {hp}.")
    timeout = hp["max_train_time_s"]
    budget = stopit.ThreadingTimeout(timeout) if timeout is not None else nullcontext()
    with budget as c_mgr:
        for epoch in range(hp["max_epochs"]):
            with Stopwatch() as sw:
                order = train[rng.permutation(len(train))]
                losses, correct = [], 0
                for batch, start in enumerate(range(0, len(order), hp["batch_size"])):
                    index = order[start : start + hp["batch_size"]]
                    try:
                        loss, predicted = backward_and_step(
                            network, x[index], y[index], optimizer
                        )
                    except NumericalError as e:
                        raise NumericalError(
                            f"{name}: {e} Epoch {epoch}, batch {batch}, "
                            f"last finite loss {last_loss}."
                        ) from e
                    last_loss = loss
                    log.log(MACHINE_LOG_LEVEL, f"{name} E{epoch} B{batch}: {loss:.6f}")
                    losses.append(loss * len(index))
                    correct += int(np.sum(predicted == y[index]))
                train_loss = sum(losses) / len(train)
                if validation is not None:
                    monitored = evaluate_loss(network, x[validation], y[validation])
                else:
                    monitored = train_loss
            record = EpochRecord(
                network=name,
                epoch=epoch,
                train_loss=train_loss,
                validation_loss=monitored if validation is not None else float("nan"),
                train_accuracy=correct / len(train),
                duration=sw.elapsed_time,
            )
            history.append(record)
            if trace is not None:
                trace.log_epoch(record)

            if monitored < best_loss:
                best_loss, waited = monitored, 0
                best_state = {k: v.copy() for k, v in network.state().items()}
            else:
                waited += 1
                if waited >= hp["patience"]:
                    log.debug(f"{name} stopped early after epoch {epoch}.")
                    break

    timed_out = c_mgr is not None and c_mgr.state == c_mgr.TIMED_OUT
    if timed_out:
        log.warning(
            f"{name} reached its time budget of {timeout}s after "
            f"{len(history)} epochs, keeping the best parameters so far."
        )
    if best_state is not None:
        network.load_state(best_state)
    elif timed_out:
        network.load_state(initial_state)
    network.history = history
    if history:
        log.info(
            f"{name} trained {len(history)} epochs, "
            f"best monitored loss {best_loss:.4f}."
        )
    return network
