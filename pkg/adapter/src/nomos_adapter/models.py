"""Model loading and inference, implemented from scratch in plain Python.

Supported model files:

* decision trees: node array with {"feature", "threshold", "left", "right"}
  internal nodes and {"class"} leaves; a value <= threshold goes left;
* mlps: {"layers": [{"weights": [[...], ...], "bias": [...]}, ...]} with
  row-major (out x in) weights, ReLU between layers, argmax at the end
  (first maximum wins).
"""

from __future__ import annotations

import json
from pathlib import Path


class ModelError(Exception):
    pass


class TreeModel:
    def __init__(self, nodes: list[dict], root: int):
        self.nodes = nodes
        self.root = root
        self._check()

    def _check(self) -> None:
        if not self.nodes:
            raise ModelError("tree has no nodes")
        if not 0 <= self.root < len(self.nodes):
            raise ModelError("root index out of range")
        seen: set[int] = set()
        stack = [self.root]
        while stack:
            idx = stack.pop()
            if idx in seen:
                continue
            if not 0 <= idx < len(self.nodes):
                raise ModelError(f"node index {idx} out of range")
            seen.add(idx)
            node = self.nodes[idx]
            if "class" not in node:
                for key in ("feature", "threshold", "left", "right"):
                    if key not in node:
                        raise ModelError(f"internal node missing {key!r}")
                stack.append(node["left"])
                stack.append(node["right"])

    def predict(self, values: list) -> int:
        idx = self.root
        hops = 0
        while True:
            node = self.nodes[idx]
            if "class" in node:
                return int(node["class"])
            feature = node["feature"]
            if feature >= len(values):
                raise ModelError(f"row has no feature {feature}")
            value = values[feature]
            if isinstance(value, str):
                raise ModelError(f"feature {feature} is a string")
            idx = node["left"] if value <= node["threshold"] else node["right"]
            hops += 1
            if hops > len(self.nodes):
                raise ModelError("tree walk did not terminate")


class MlpModel:
    def __init__(self, layers: list[dict]):
        if not layers:
            raise ModelError("network has no layers")
        self.layers = layers
        for i, layer in enumerate(layers):
            weights, bias = layer.get("weights"), layer.get("bias")
            if not weights or bias is None or len(weights) != len(bias):
                raise ModelError(f"layer {i} is malformed")

    def predict(self, values: list) -> int:
        x = []
        for value in values:
            if isinstance(value, str):
                raise ModelError("network input contains a string")
            x.append(float(value))
        expected = len(self.layers[0]["weights"][0])
        if len(x) != expected:
            raise ModelError(f"input has {len(x)} values, network expects {expected}")
        for i, layer in enumerate(self.layers):
            out = []
            for row, b in zip(layer["weights"], layer["bias"]):
                acc = b
                for w, v in zip(row, x):
                    acc += w * v
                out.append(acc)
            if i < len(self.layers) - 1:
                out = [v if v > 0.0 else 0.0 for v in out]
            x = out
        best = 0
        for i in range(1, len(x)):
            if x[i] > x[best]:
                best = i
        return best


def load_model(path: str | Path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot load {path}: {exc}") from None
    kind = data.get("type")
    if kind == "decision_tree":
        return TreeModel(data.get("nodes", []), int(data.get("root", 0)))
    if kind == "mlp":
        return MlpModel(data.get("layers", []))
    raise ModelError(f"unsupported model type {kind!r}")


def record_values(record: dict) -> list:
    """Extract the flat value list from a wire-format record."""
    kind = record.get("kind")
    if kind == "tabular":
        return list(record["values"])
    if kind == "grid":
        return [float(c) for c in record["cells"]]
    raise ModelError(f"unsupported record kind {kind!r}")


def predict_values(model, record: dict) -> int:
    return model.predict(record_values(record))
