from __future__ import annotations

import pytest

from nomos.ast_nodes import VarRef, walk_exprs
from nomos.errors import SemaError
from nomos.parser import parse
from nomos.sema import Kind, check
from nomos.stdlib import default_registry

from conftest import corpus_paths, load_checked

COMPAS_SCHEMA = (("age", "int"), ("felonies", "int"), ("misdemeanors", "int"),
                 ("priors", "int"), ("others", "int"), ("is_recid", "int"))


def check_src(source, schemas=None):
    return check(parse(source), default_registry(), schemas=schemas)


def rules_of(exc_info):
    return sorted(d.rule for d in exc_info.value.diagnostics if d.severity == "error")


def test_felony_inc_kinds_and_k_static(specs_dir):
    typed, _ = load_checked(specs_dir / "compas_felony_inc.nomos")
    assert typed.k_static == 2
    assert typed.symbols["v1"].kind is Kind.INT
    assert typed.symbols["v2"].kind is Kind.INT
    assert typed.symbols["d1"].kind is Kind.INT
    assert typed.symbols["d2"].kind is Kind.INT
    assert typed.warnings == []


def test_relax_spec_counts_two_static_sites(specs_dir):
    typed, _ = load_checked(specs_dir / "lander_relax.nomos")
    assert typed.k_static == 2


def test_every_corpus_spec_checks_clean():
    for path in corpus_paths():
        typed, _ = load_checked(path)
        assert typed.warnings == [], path.name


def test_precondition_referencing_output_is_r2():
    src = (
        "import m;\n"
        "input x1;\n"
        "requires d1 <= 2;\n"
        "output d1;\n"
        "{\n  d1 = predict(x1)\n}\n"
    )
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert rules_of(exc) == ["R2"]


def test_renaming_one_used_variable_gives_exactly_one_r1(specs_dir):
    source = (specs_dir / "compas_felony_inc.nomos").read_text()
    spec = parse(source)
    # rename a single use of v1 to an undeclared name
    for expr in walk_exprs(spec.vars[1].init):
        if isinstance(expr, VarRef) and expr.name == "v1":
            expr.name = "nope"
    with pytest.raises(SemaError) as exc:
        check(spec, default_registry(), schemas={"x1": COMPAS_SCHEMA})
    assert rules_of(exc) == ["R1"]


def test_duplicate_declaration_is_r1():
    src = "input x1;\ninput x1;\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R1" in rules_of(exc)


def test_unassigned_output_is_r3():
    src = "input x1;\noutput d1;\noutput d2;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert rules_of(exc) == ["R3"]


def test_assignment_inside_loop_is_not_definite():
    src = (
        "input x1;\n"
        "output d1;\n"
        "{\n"
        "  for i in range(3):\n"
        "    d1 = i\n"
        "}\n"
    )
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R3" in rules_of(exc)


def test_use_before_assignment_is_r3():
    src = "input x1;\noutput d1;\noutput d2;\n{\n  d1 = d2\n  d2 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R3" in rules_of(exc)


def test_assigning_to_input_or_var_is_r3():
    src = "input x1;\nvar v := 1;\noutput d1;\n{\n  v = 2\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R3" in rules_of(exc)


def test_wrong_arity_is_r4():
    src = "input x1;\nvar v := getFeat(x1);\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R4" in rules_of(exc)


def test_unknown_function_is_r4():
    src = "input x1;\nvar v := mystery(x1);\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R4" in rules_of(exc)


def test_predict_outside_code_block_is_r4():
    src = "import m;\ninput x1;\nvar v := predict(x1);\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R4" in rules_of(exc)


def test_predict_needs_exactly_one_import():
    src = "input x1;\noutput d1;\n{\n  d1 = predict(x1)\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert "R4" in rules_of(exc)


def test_non_bool_condition_is_r5():
    src = "input x1;\nrequires 1 + 1;\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert rules_of(exc) == ["R5"]

    src = "input x1;\noutput d1;\n{\n  d1 = 0\n}\nensures d1 + 1;\n"
    with pytest.raises(SemaError) as exc:
        check_src(src)
    assert rules_of(exc) == ["R5"]


def test_getfeat_without_schema_warns_and_types_float():
    src = "input x1;\nvar v := getFeat(x1, 1);\noutput d1;\n{\n  d1 = 0\n}\n"
    typed = check_src(src)
    assert typed.symbols["v"].kind is Kind.FLOAT
    assert len(typed.warnings) == 1
    assert typed.warnings[0].rule == "W1"


def test_getfeat_with_schema_types_per_feature():
    hotel = (("pos", "str"), ("neg", "str"))
    src = ("input x1;\nvar v := getFeat(x1, 1);\nvar w := strConcat(v, v);\n"
           "output d1;\n{\n  d1 = 0\n}\n")
    typed = check_src(src, schemas={"x1": hotel})
    assert typed.symbols["v"].kind is Kind.STRING
    assert typed.warnings == []


def test_static_feature_index_out_of_range_is_r4():
    src = "input x1;\nvar v := getFeat(x1, 99);\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src, schemas={"x1": COMPAS_SCHEMA})
    assert "R4" in rules_of(exc)


def test_setfeat_static_kind_mismatch_is_r4():
    src = 'input x1;\nvar x2 := setFeat(x1, 1, "abc");\noutput d1;\n{\n  d1 = 0\n}\n'
    with pytest.raises(SemaError) as exc:
        check_src(src, schemas={"x1": COMPAS_SCHEMA})
    assert "R4" in rules_of(exc)


def test_blur_on_tabular_schema_is_r4():
    src = "input x1;\nvar x2 := blur(x1);\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check_src(src, schemas={"x1": COMPAS_SCHEMA})
    assert "R4" in rules_of(exc)


def test_diagnostics_render_with_rule_ids():
    src = "input x1;\nrequires d9 <= 2;\noutput d1;\n{\n  d1 = 0\n}\n"
    with pytest.raises(SemaError) as exc:
        check(parse(src), default_registry(), filename="spec.nomos")
    rendered = exc.value.diagnostics[0].render()
    assert rendered.startswith("spec.nomos:2:")
    assert "error[R1]" in rendered


def test_check_is_deterministic():
    src = ("input x1;\nvar v := mystery(x1);\nrequires d1 <= 2;\n"
           "output d1;\n{\n  d1 = q\n}\nensures 1 + 1;\n")
    results = []
    for _ in range(2):
        with pytest.raises(SemaError) as exc:
            check_src(src)
        results.append([(d.rule, d.message, d.span) for d in exc.value.diagnostics])
    assert results[0] == results[1]
