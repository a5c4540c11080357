from __future__ import annotations

import json
import shlex
import sys

import pytest

from nomos.backends import (
    ChildProcessChannel,
    DecisionTree,
    TablePolicy,
    ToyEnv,
    TreeLeaf,
    TreeSplit,
    dt_predict,
    env_policy_from_json,
    mlp_from_json,
    mlp_predict,
    play,
    tree_from_json,
)
from nomos.errors import (
    BackendError,
    DimError,
    KindError,
    ModelFormatError,
    ProtocolError,
    SchemaError,
)
from nomos.data import load_dataset
from nomos.records import GameState, Grid, Tabular
from nomos.stdlib import EvalContext, StdlibConfig, relax

INT3 = (("f0", "int"), ("f1", "int"), ("f2", "int"))


def row3(f0, f1, f2):
    return Tabular(schema=INT3, values=(f0, f1, f2))


# ── dataset loading ──────────────────────────────────────────────


def test_load_three_row_int_csv(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a:int,b:int,label\n1,2,0\n3,4,1\n5,6,2\n")
    source = load_dataset(path)
    assert len(source) == 3
    assert source.shape == ("tabular", (("a", "int"), ("b", "int")))
    assert source.rows[0] == Tabular(schema=source.shape[1], values=(1, 2))
    assert source.rows[2].label == 2


def test_non_numeric_value_in_int_column_reports_row(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a:int,label\n1,0\nxyz,1\n")
    with pytest.raises(SchemaError) as exc:
        load_dataset(path)
    assert exc.value.row == 3  # header is line 1, offending data line is 3
    assert "xyz" in str(exc.value)


def test_header_only_csv_is_empty_dataset(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a:int,label\n")
    with pytest.raises(SchemaError, match="empty dataset"):
        load_dataset(path)


def test_unannotated_columns_default_to_float(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a,b:str,label\n1.5,hi,0\n")
    source = load_dataset(path)
    assert source.shape[1] == (("a", "float"), ("b", "str"))
    assert source.rows[0].values == (1.5, "hi")


def test_gamestate_csv_detected_by_header(tmp_path):
    path = tmp_path / "pool.csv"
    path.write_text("terrain,lander_x,lander_vy,fuel\n2,7,-1,5\n")
    source = load_dataset(path)
    assert source.shape == ("gamestate",)
    assert source.rows[0] == GameState(2, 7, -1, 5)


def test_grid_csv_detected_and_bounded(tmp_path):
    path = tmp_path / "grid.csv"
    path.write_text("label,p0_0,p0_1,p1_0,p1_1\n3,0.0,0.25,0.5,1.0\n")
    source = load_dataset(path)
    assert source.shape == ("grid", (2, 2))
    assert source.rows[0] == Grid(2, 2, (0.0, 0.25, 0.5, 1.0))
    assert source.rows[0].label == 3

    bad = tmp_path / "bad.csv"
    bad.write_text("label,p0_0,p0_1,p1_0,p1_1\n3,0.0,0.25,0.5,1.5\n")
    with pytest.raises(SchemaError, match="outside"):
        load_dataset(bad)


def test_column_count_mismatch_reports_row(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a:int,label\n1,0\n1\n")
    with pytest.raises(SchemaError) as exc:
        load_dataset(path)
    assert exc.value.row == 3


# ── decision tree ────────────────────────────────────────────────


def test_single_leaf_tree_is_constant():
    tree = DecisionTree(nodes=(TreeLeaf(2),))
    assert dt_predict(tree, row3(0, 0, 0)) == 2
    assert dt_predict(tree, row3(99, -5, 7)) == 2


def test_depth1_split_goes_left_on_leq():
    tree = DecisionTree(nodes=(TreeSplit(0, 5.0, 1, 2), TreeLeaf(0), TreeLeaf(1)))
    assert dt_predict(tree, row3(3, 0, 0)) == 0
    assert dt_predict(tree, row3(5, 0, 0)) == 0  # boundary goes left
    assert dt_predict(tree, row3(7, 0, 0)) == 1


def test_dt_rejects_non_tabular():
    tree = DecisionTree(nodes=(TreeLeaf(0),))
    with pytest.raises(KindError):
        dt_predict(tree, Grid(1, 1, (0.5,)))


def test_cyclic_tree_rejected_at_load():
    with pytest.raises(ModelFormatError, match="cycle"):
        tree_from_json({"type": "decision_tree", "root": 0, "nodes": [
            {"feature": 0, "threshold": 1.0, "left": 1, "right": 0},
            {"class": 0},
        ]})


def _oracle_tree_walk(nodes, index, values):
    """Independent recursive evaluator over the raw JSON node array."""
    node = nodes[index]
    if "class" in node:
        return node["class"]
    if values[node["feature"]] <= node["threshold"]:
        return _oracle_tree_walk(nodes, node["left"], values)
    return _oracle_tree_walk(nodes, node["right"], values)


def test_depth3_fixture_matches_recursive_oracle_exhaustively(fixtures_dir):
    raw = json.loads((fixtures_dir / "dt_depth3.json").read_text())
    tree = tree_from_json(raw)
    for f0 in range(0, 55, 5):
        for f1 in range(0, 13):
            for f2 in range(0, 9):
                record = row3(f0, f1, f2)
                assert dt_predict(tree, record) == _oracle_tree_walk(
                    raw["nodes"], raw["root"], record.values)


# ── feed-forward network ─────────────────────────────────────────


def test_identity_single_layer_argmax():
    model = mlp_from_json({"type": "mlp", "layers": [
        {"weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]},
    ]})
    grid = Grid(1, 2, (0.1, 0.9))
    assert mlp_predict(model, grid) == 1


def test_all_zero_network_breaks_ties_to_lowest_class():
    model = mlp_from_json({"type": "mlp", "layers": [
        {"weights": [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], "bias": [0.0, 0.0, 0.0]},
    ]})
    assert mlp_predict(model, Grid(1, 2, (0.3, 0.4))) == 0


def test_length_mismatch_is_dim_error(fixtures_dir):
    model = mlp_from_json(json.loads((fixtures_dir / "mlp_small.json").read_text()))
    with pytest.raises(DimError):
        mlp_predict(model, Grid(1, 2, (0.1, 0.2)))


def _oracle_forward(layers, x):
    """Independent straight-line forward pass over the raw JSON weights."""
    x = list(x)
    for i, layer in enumerate(layers):
        weights, bias = layer["weights"], layer["bias"]
        x = [sum(w_row[j] * x[j] for j in range(len(x))) + b
             for w_row, b in zip(weights, bias)]
        if i < len(layers) - 1:
            x = [max(v, 0.0) for v in x]
    best = 0
    for i in range(1, len(x)):
        if x[i] > x[best]:
            best = i
    return best


PINNED_INPUTS = [
    (34, 15, 2, 6, 1, 1),
    (44, 2, 4, 19, 8, 1),
    (25, 2, 0, 10, 1, 1),
    (0, 0, 0, 0, 0, 0),
    (70, 1, 12, 3, 9, 0),
]


def test_small_mlp_matches_matrix_oracle_on_pinned_inputs(fixtures_dir, compas_source):
    raw = json.loads((fixtures_dir / "mlp_small.json").read_text())
    model = mlp_from_json(raw)
    schema = tuple((f"f{i}", "int") for i in range(6))
    for values in PINNED_INPUTS:
        record = Tabular(schema=schema, values=values)
        assert mlp_predict(model, record) == _oracle_forward(raw["layers"], values)
    for record in compas_source.rows:
        assert mlp_predict(model, record) == _oracle_forward(raw["layers"], record.values)


def test_final_layer_positive_scaling_keeps_classes(fixtures_dir, compas_source):
    raw = json.loads((fixtures_dir / "mlp_small.json").read_text())
    base = mlp_from_json(raw)
    baseline = [mlp_predict(base, record) for record in compas_source.rows]
    for c in (2.0, 0.5, 4.0, 0.125, 3.0):
        scaled_raw = json.loads(json.dumps(raw))
        final = scaled_raw["layers"][-1]
        final["weights"] = [[c * w for w in row] for row in final["weights"]]
        final["bias"] = [c * b for b in final["bias"]]
        scaled = mlp_from_json(scaled_raw)
        assert [mlp_predict(scaled, r) for r in compas_source.rows] == baseline, c


# ── toy environment ──────────────────────────────────────────────


SAFE_ENV = ToyEnv()  # deterministic thrust


def _safe_policy():
    entries = {}
    for terrain in range(0, 9):
        for gap in range(0, 13):
            for vy in range(-6, 7):
                entries[(terrain, gap, vy)] = "thrust" if vy <= -2 else "coast"
    return TablePolicy(entries=entries)


def test_already_on_terrain_with_zero_velocity_wins():
    state = GameState(terrain=3, lander_x=3, lander_vy=0, fuel=5)
    assert play(SAFE_ENV, _safe_policy(), state, seed=0) == 1


def test_no_fuel_fast_and_high_always_crashes():
    state = GameState(terrain=0, lander_x=12, lander_vy=-6, fuel=0)
    assert play(SAFE_ENV, _safe_policy(), state, seed=0) == 0


def test_play_is_deterministic_over_repeated_calls():
    env = ToyEnv(thrust_prob=(0.7,))  # stochastic thrust
    policy = _safe_policy()
    state = GameState(terrain=2, lander_x=9, lander_vy=-3, fuel=6)
    outcomes = {play(env, policy, state, seed=99) for _ in range(1000)}
    assert len(outcomes) == 1


def test_different_seeds_may_change_stochastic_outcomes():
    env = ToyEnv(thrust_prob=(0.5,))
    policy = _safe_policy()
    state = GameState(terrain=1, lander_x=9, lander_vy=-4, fuel=8)
    outcomes = {play(env, policy, state, seed=s) for s in range(64)}
    assert outcomes == {0, 1}


def _oracle_episode(env_raw, entries, state, seed):
    """Independent episode simulation over the raw fixture JSON."""
    from nomos.rng import Splitmix64

    rng = Splitmix64(seed)
    x, vy, fuel = state.lander_x, state.lander_vy, state.fuel
    terrain = state.terrain
    gap_cap, vy_cap = 12, 6
    for _ in range(env_raw["max_steps"]):
        if x <= terrain:
            return 1 if abs(vy) <= env_raw["safe_v"] else 0
        key = f"{terrain},{min(x - terrain, gap_cap)},{max(-vy_cap, min(vy, vy_cap))}"
        action = entries.get(key, "coast")
        if action == "thrust" and fuel > 0:
            p = env_raw["thrust_prob"][min(fuel, len(env_raw["thrust_prob"]) - 1)]
            fuel -= 1
            if rng.uniform01() < p:
                vy += env_raw["thrust_power"]
        vy -= env_raw["gravity"]
        x += vy
    return 0


def test_play_matches_independent_simulator_on_pool(fixtures_dir, lander_pool):
    raw = json.loads((fixtures_dir / "lander_safe.json").read_text())
    env, policy = env_policy_from_json(raw)
    for state in lander_pool.rows:
        for seed in (0, 1):
            assert play(env, policy, state, seed) == _oracle_episode(
                raw["env"], raw["policy"]["entries"], state, seed)


def test_safe_policy_is_relax_monotone_on_exhaustive_pool(fixtures_dir, lander_pool):
    env, policy = env_policy_from_json(
        json.loads((fixtures_dir / "lander_safe.json").read_text()))
    ctx = EvalContext(StdlibConfig())
    for state in lander_pool.rows:
        relaxed = relax(ctx, state)
        for seed in (0, 1):
            assert play(env, policy, relaxed, seed) >= play(env, policy, state, seed), state


def test_buggy_policy_has_relax_violations_on_pool(fixtures_dir, lander_pool):
    env, policy = env_policy_from_json(
        json.loads((fixtures_dir / "lander_buggy.json").read_text()))
    ctx = EvalContext(StdlibConfig())
    violations = [s for s in lander_pool.rows
                  if play(env, policy, relax(ctx, s), 0) < play(env, policy, s, 0)]
    assert violations


# ── child-process protocol client ────────────────────────────────


def _stub_cmdline(body: str) -> str:
    script = (
        "import sys, json\n"
        "for line in sys.stdin:\n"
        "    try:\n"
        "        msg = json.loads(line)\n"
        "    except Exception:\n"
        "        print(json.dumps({'error': 'parse'}), flush=True); continue\n"
        "    op = msg.get('op')\n"
        "    if op == 'hello':\n"
        "        print(json.dumps({'ok': True, 'capabilities': ['predict']}), flush=True)\n"
        "    elif op == 'bye':\n"
        "        break\n"
        "    elif op == 'predict':\n"
        f"        {body}\n"
    )
    return f"{shlex.quote(sys.executable)} -c {shlex.quote(script)}"


def test_external_predict_round_trip():
    channel = ChildProcessChannel(
        _stub_cmdline("print(json.dumps({'class': 1}), flush=True)"), deadline=5.0)
    try:
        assert channel.predict(row3(1, 2, 3)) == 1
    finally:
        channel.close()


def test_external_error_response_is_backend_error():
    channel = ChildProcessChannel(
        _stub_cmdline("print(json.dumps({'error': 'bad record'}), flush=True)"), deadline=5.0)
    try:
        with pytest.raises(BackendError, match="bad record"):
            channel.predict(row3(1, 2, 3))
    finally:
        channel.close()


def test_external_malformed_response_is_protocol_error():
    channel = ChildProcessChannel(_stub_cmdline("print('{', flush=True)"), deadline=5.0)
    try:
        with pytest.raises(ProtocolError):
            channel.predict(row3(1, 2, 3))
    finally:
        channel.close()


def test_adapter_killed_mid_call_is_timeout():
    channel = ChildProcessChannel(_stub_cmdline("sys.exit(0)"), deadline=5.0)
    try:
        with pytest.raises(TimeoutError):
            channel.predict(row3(1, 2, 3))
    finally:
        channel.close()


def test_slow_adapter_hits_deadline():
    channel = ChildProcessChannel(
        _stub_cmdline("__import__('time').sleep(30); print('{}', flush=True)"),
        deadline=0.4)
    try:
        with pytest.raises(TimeoutError):
            channel.predict(row3(1, 2, 3))
    finally:
        channel.close()


def test_failed_handshake_is_protocol_error():
    script = ("import sys, json\n"
              "for line in sys.stdin:\n"
              "    print(json.dumps({'ok': False}), flush=True)\n")
    cmd = f"{shlex.quote(sys.executable)} -c {shlex.quote(script)}"
    with pytest.raises(ProtocolError, match="handshake"):
        ChildProcessChannel(cmd, deadline=5.0)
