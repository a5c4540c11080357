"""Model backends: decision trees, feed-forward nets, the toy episodic
environment with table policies, and a child-process protocol client.

Model files are single JSON documents dispatched on their "type" field:

* ``decision_tree``: {"type": "decision_tree", "root": 0, "nodes": [...]}
  where an internal node is {"feature": i, "threshold": t, "left": j,
  "right": k} (value <= threshold goes left) and a leaf is {"class": c};
* ``mlp``: {"type": "mlp", "layers": [{"weights": [[...], ...],
  "bias": [...]}, ...]} with row-major (out x in) weight matrices, ReLU on
  hidden layers, and argmax over the final affine layer (ties break to the
  lowest class index);
* ``toy_env_policy``: environment parameters plus a discretized-state
  action table, see ToyEnv / TablePolicy.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    BackendError,
    DimError,
    KindError,
    ModelFormatError,
    ProtocolError,
)
from .records import (
    GameState,
    Record,
    Tabular,
    flatten_numeric,
    record_to_wire,
)
from .rng import Splitmix64

PROTOCOL_VERSION = 1
DEFAULT_DEADLINE = 10.0


# ── decision tree ────────────────────────────────────────────────


@dataclass(frozen=True)
class TreeSplit:
    feature: int
    threshold: float
    left: int
    right: int


@dataclass(frozen=True)
class TreeLeaf:
    class_index: int


@dataclass(frozen=True)
class DecisionTree:
    nodes: tuple[Union[TreeSplit, TreeLeaf], ...]
    root: int = 0

    def __post_init__(self) -> None:
        self._validate()

    def _validate(self) -> None:
        if not 0 <= self.root < len(self.nodes):
            raise ModelFormatError(f"root index {self.root} out of range")
        # every path must reach a leaf without revisiting a node
        state = {}  # 0 = on stack, 1 = done

        def visit(index: int) -> None:
            if not 0 <= index < len(self.nodes):
                raise ModelFormatError(f"child index {index} out of range")
            if state.get(index) == 0:
                raise ModelFormatError("cycle in decision tree")
            if state.get(index) == 1:
                return
            state[index] = 0
            node = self.nodes[index]
            if isinstance(node, TreeSplit):
                visit(node.left)
                visit(node.right)
            state[index] = 1

        visit(self.root)


def tree_from_json(data: dict) -> DecisionTree:
    nodes = []
    for raw in data.get("nodes", []):
        if "class" in raw:
            nodes.append(TreeLeaf(int(raw["class"])))
        else:
            try:
                nodes.append(TreeSplit(int(raw["feature"]), float(raw["threshold"]),
                                       int(raw["left"]), int(raw["right"])))
            except KeyError as missing:
                raise ModelFormatError(f"tree node missing field {missing}") from None
    if not nodes:
        raise ModelFormatError("decision tree has no nodes")
    return DecisionTree(nodes=tuple(nodes), root=int(data.get("root", 0)))


def dt_predict(tree: DecisionTree, record: Record) -> int:
    """Walk the tree: value <= threshold goes left."""
    if not isinstance(record, Tabular):
        raise KindError(f"decision tree needs a tabular record, got {type(record).__name__}")
    index = tree.root
    while True:
        node = tree.nodes[index]
        if isinstance(node, TreeLeaf):
            return node.class_index
        if node.feature >= len(record.values):
            raise KindError(f"tree splits on feature {node.feature} but row has "
                            f"{len(record.values)} features")
        value = record.values[node.feature]
        if isinstance(value, str):
            raise KindError(f"tree splits on string feature {node.feature}")
        index = node.left if value <= node.threshold else node.right


# ── feed-forward network ─────────────────────────────────────────


@dataclass(frozen=True)
class MlpModel:
    # per layer: (weights with shape (out, in), bias with shape (out,))
    layers: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ModelFormatError("network has no layers")
        for i, (weights, bias) in enumerate(self.layers):
            if weights.ndim != 2 or bias.ndim != 1 or weights.shape[0] != bias.shape[0]:
                raise ModelFormatError(f"layer {i} has inconsistent shapes")
            if i > 0 and weights.shape[1] != self.layers[i - 1][0].shape[0]:
                raise ModelFormatError(f"layer {i} input dim {weights.shape[1]} != "
                                       f"layer {i - 1} output dim")


def mlp_from_json(data: dict) -> MlpModel:
    layers = []
    for raw in data.get("layers", []):
        weights = np.asarray(raw["weights"], dtype=np.float64)
        bias = np.asarray(raw["bias"], dtype=np.float64)
        layers.append((weights, bias))
    return MlpModel(layers=tuple(layers))


def mlp_predict(model: MlpModel, record: Record) -> int:
    x = np.asarray(flatten_numeric(record), dtype=np.float64)
    expected = model.layers[0][0].shape[1]
    if x.shape[0] != expected:
        raise DimError(f"input has {x.shape[0]} values, network expects {expected}")
    for i, (weights, bias) in enumerate(model.layers):
        x = weights @ x + bias
        if i < len(model.layers) - 1:
            x = np.maximum(x, 0.0)
    return int(np.argmax(x))  # first maximum wins ties


# ── toy episodic environment ─────────────────────────────────────


@dataclass(frozen=True)
class ToyEnv:
    h_max: int = 8
    gravity: int = 1
    thrust_power: int = 2
    safe_v: int = 2
    # success probability of a thrust attempt, indexed by min(fuel, len - 1)
    thrust_prob: tuple[float, ...] = (1.0,)
    max_steps: int = 64


@dataclass(frozen=True)
class TablePolicy:
    """Action table over discretized states (terrain, capped gap, clamped vy)."""

    entries: dict
    default: str = "coast"
    gap_cap: int = 12
    vy_cap: int = 6

    def action(self, terrain: int, gap: int, vy: int) -> str:
        key = (terrain, min(gap, self.gap_cap), max(-self.vy_cap, min(vy, self.vy_cap)))
        return self.entries.get(key, self.default)


def play(env: ToyEnv, policy: TablePolicy, state: GameState, seed: int) -> int:
    """Simulate one episode; returns 1 on a safe landing, 0 otherwise.

    The episode PRNG is seeded with ``seed`` only, so identical (state, seed)
    pairs always give the same outcome, and episode draws never reach the
    test-generation trace.
    """
    if not isinstance(state, GameState):
        raise KindError(f"play needs a game state, got {type(state).__name__}")
    rng = Splitmix64(seed)
    x, vy, fuel = state.lander_x, state.lander_vy, state.fuel
    terrain = state.terrain
    for _ in range(env.max_steps):
        if x <= terrain:
            return 1 if abs(vy) <= env.safe_v else 0
        action = policy.action(terrain, x - terrain, vy)
        if action == "thrust" and fuel > 0:
            p = env.thrust_prob[min(fuel, len(env.thrust_prob) - 1)]
            fuel -= 1
            if rng.uniform01() < p:
                vy += env.thrust_power
        vy -= env.gravity
        x += vy
    return 0  # never reached the surface


def env_policy_from_json(data: dict) -> tuple[ToyEnv, TablePolicy]:
    env_raw = data.get("env", {})
    env = ToyEnv(
        h_max=int(env_raw.get("h_max", 8)),
        gravity=int(env_raw.get("gravity", 1)),
        thrust_power=int(env_raw.get("thrust_power", 2)),
        safe_v=int(env_raw.get("safe_v", 2)),
        thrust_prob=tuple(float(p) for p in env_raw.get("thrust_prob", [1.0])),
        max_steps=int(env_raw.get("max_steps", 64)),
    )
    pol_raw = data.get("policy", {})
    entries = {}
    for key, action in pol_raw.get("entries", {}).items():
        parts = key.split(",")
        if len(parts) != 3 or action not in ("thrust", "coast"):
            raise ModelFormatError(f"bad policy entry {key!r}: {action!r}")
        entries[(int(parts[0]), int(parts[1]), int(parts[2]))] = action
    policy = TablePolicy(
        entries=entries,
        default=pol_raw.get("default", "coast"),
        gap_cap=int(pol_raw.get("gap_cap", 12)),
        vy_cap=int(pol_raw.get("vy_cap", 6)),
    )
    return env, policy


# ── backend wrappers ─────────────────────────────────────────────


class TreeBackend:
    def __init__(self, tree: DecisionTree):
        self.tree = tree

    def predict(self, record: Record) -> int:
        return dt_predict(self.tree, record)

    def play(self, state: Record, seed: int) -> int:
        raise BackendError("decision tree backends do not support play")

    def close(self) -> None:
        pass


class MlpBackend:
    def __init__(self, model: MlpModel):
        self.model = model

    def predict(self, record: Record) -> int:
        return mlp_predict(self.model, record)

    def play(self, state: Record, seed: int) -> int:
        raise BackendError("network backends do not support play")

    def close(self) -> None:
        pass


class ToyEnvBackend:
    def __init__(self, env: ToyEnv, policy: TablePolicy):
        self.env = env
        self.policy = policy

    def predict(self, record: Record) -> int:
        raise BackendError("episodic backends do not support predict")

    def play(self, state: Record, seed: int) -> int:
        return play(self.env, self.policy, state, seed)

    def close(self) -> None:
        pass


# ── child-process protocol client ────────────────────────────────


class ChildProcessChannel:
    """Newline-delimited JSON over a child's stdin/stdout; one request in flight."""

    _EOF = object()

    def __init__(self, cmdline: str, deadline: float = DEFAULT_DEADLINE):
        self.cmdline = cmdline
        self.deadline = deadline
        self._lock = threading.Lock()
        self._proc = subprocess.Popen(
            shlex.split(cmdline),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._handshake()

    def _pump(self) -> None:
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(self._EOF)

    def _request(self, message: dict) -> dict:
        with self._lock:
            try:
                self._proc.stdin.write(json.dumps(message, separators=(",", ":")) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise TimeoutError(f"backend process is gone: {exc}") from None
            try:
                line = self._lines.get(timeout=self.deadline)
            except queue.Empty:
                raise TimeoutError(
                    f"no response from {self.cmdline!r} within {self.deadline}s") from None
            if line is self._EOF:
                raise TimeoutError(f"backend {self.cmdline!r} closed its stream mid-call")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed response line: {exc}") from None
        if not isinstance(response, dict):
            raise ProtocolError(f"response is not an object: {response!r}")
        return response

    def _handshake(self) -> None:
        response = self._request({"op": "hello", "version": PROTOCOL_VERSION})
        if response.get("ok") is not True or "predict" not in response.get("capabilities", []):
            raise ProtocolError(f"handshake failed: {response!r}")

    def predict(self, record: Record) -> int:
        response = self._request({"op": "predict", "record": record_to_wire(record)})
        if "error" in response:
            raise BackendError(str(response["error"]))
        if "class" not in response or not isinstance(response["class"], int):
            raise ProtocolError(f"response has no integer class field: {response!r}")
        return response["class"]

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write('{"op":"bye"}\n')
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                pass
            try:
                self._proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        if self._proc.stdin and not self._proc.stdin.closed:
            try:
                self._proc.stdin.close()
            except (BrokenPipeError, OSError):
                pass


class ExternalBackend:
    def __init__(self, channel: ChildProcessChannel):
        self.channel = channel

    def predict(self, record: Record) -> int:
        return self.channel.predict(record)

    def play(self, state: Record, seed: int) -> int:
        raise BackendError("external backends do not support play")

    def close(self) -> None:
        self.channel.close()


# ── loading ──────────────────────────────────────────────────────


def load_model_file(path: str | Path):
    """Load a model JSON file into a backend object."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON: {exc}") from None
    model_type = data.get("type")
    if model_type == "decision_tree":
        return TreeBackend(tree_from_json(data))
    if model_type == "mlp":
        return MlpBackend(mlp_from_json(data))
    if model_type == "toy_env_policy":
        env, policy = env_policy_from_json(data)
        return ToyEnvBackend(env, policy)
    raise ModelFormatError(f"{path}: unknown model type {model_type!r}")


def open_backend(binding: str | Path, deadline: float = DEFAULT_DEADLINE):
    """Resolve a model binding: a JSON file path or ``exec:CMDLINE``."""
    binding = str(binding)
    if binding.startswith("exec:"):
        return ExternalBackend(ChildProcessChannel(binding[len("exec:"):], deadline=deadline))
    return load_model_file(binding)
