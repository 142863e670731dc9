import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capclass import synth
from capclass.capgrowth import CAR, ExtractionParams
from capclass.ensemble import (Model, ModelFormatError, consolidate, coverage_prune, format_model,
                               parse_model, read_model, sort_rules, train, train_partitions,
                               write_model)

from conftest import ids, readable

TOY = ExtractionParams(0.3, 0.51, 0.0)


def test_consolidate_examples():
    a = [CAR((2,), 1, 0.5, 0.75, 3.0)]
    b = [CAR((2,), 1, 0.5, 0.6, 2.0)]
    (merged,) = consolidate([a, b], "max")
    assert merged.confidence == 0.75 and merged.chi2 == 3.0
    (merged,) = consolidate([a, b], "product")
    assert merged.confidence == pytest.approx(0.45)
    (merged,) = consolidate([a, b], "min")
    assert merged.confidence == 0.6
    with pytest.raises(ValueError):
        consolidate([a], "sum")


rule_st = st.builds(CAR, st.lists(st.integers(0, 4), min_size=1, max_size=3, unique=True)
                    .map(lambda x: tuple(sorted(x))), st.integers(0, 1),
                    st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(0.0, 50.0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(rule_st, max_size=8), min_size=1, max_size=6), st.randoms(),
       st.sampled_from(["max", "min", "product"]))
def test_consolidation_permutation_invariant(models, rnd, g):
    shuffled = [list(m) for m in models]
    rnd.shuffle(shuffled)
    for m in shuffled:
        rnd.shuffle(m)
    assert consolidate(models, g) == consolidate(shuffled, g)


def test_coverage_keeps_both_toy_rules(toy):
    model = train(toy, 1, 1.0, TOY)
    assert coverage_prune(model.rules, toy) == model.rules


def test_coverage_drops_duplicate_and_handles_empty(toy):
    rules = train(toy, 1, 1.0, TOY).rules
    assert coverage_prune(rules + [rules[0]], toy) == rules
    assert coverage_prune([], toy) == []


def test_coverage_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(25):
        d = synth.random_small(rng)
        rules = sort_rules(train(d, 1, 1.0, ExtractionParams(0.05, 0.3, 0.0)).rules, d.dictionary)
        covered = [False] * len(d)
        expected = []
        for r in rules:
            hit = False
            for i in range(len(d)):
                if not covered[i] and d.labels[i] == r.consequent and set(r.antecedent) <= set(d.row(i).tolist()):
                    covered[i] = hit = True
            if hit:
                expected.append(r)
        assert coverage_prune(rules, d) == expected


def test_train_toy(toy):
    model = train(toy, 1, 1.0, TOY)
    assert readable(model.rules, toy) == {(frozenset("AD"), "+"), (frozenset("C"), "-")}
    assert model.priors.tolist() == [0.5, 0.5]
    assert model.rules[0].key == (ids(toy, "A", "D"), 0)


def test_identical_partitions_keep_stats(toy):
    base = train(toy, 1, 1.0, TOY)
    doubled = train(toy, 2, 1.0, TOY, with_replacement=False)
    assert doubled.rules == base.rules


def test_many_small_partitions():
    d = synth.random_categorical(10_000, seed=4)
    params = ExtractionParams(0.05, 0.5, 0.0)
    per = train_partitions(d, 100, 0.01, params, seed=1)
    model = train(d, 100, 0.01, params, seed=1)
    assert len(model.rules) <= sum(len(p) for p in per)


def test_train_rejects_single_class(toy):
    one = toy.subset([0, 2, 4])
    one = type(one)(one.items, one.offsets, one.labels, one.dictionary,
                    type(one.label_names)(["+"]))
    with pytest.raises(ValueError):
        train(one)


def test_empty_model_is_valid(toy):
    model = train(toy, 1, 1.0, ExtractionParams(0.3, 1.0, 100.0))
    assert model.rules == []
    assert "no rules" in model.describe()
    assert parse_model(format_model(model)).rules == []


def test_workers_do_not_change_the_model():
    d = synth.planted(4000, seed=3)
    params = ExtractionParams(0.02)
    one = train(d, 4, None, params, seed=9, workers=1)
    many = train(d, 4, None, params, seed=9, workers=3)
    assert format_model(one) == format_model(many)


def test_model_round_trip(tmp_path, toy):
    model = train(synth.planted(3000, seed=1), 5, None, ExtractionParams(0.02), seed=2)
    path = tmp_path / "m.txt"
    write_model(model, path)
    back = read_model(path)
    assert format_model(back) == path.read_text()
    assert len(back.rules) == len(model.rules)
    assert back.params == model.params
    text = path.read_text().splitlines()
    assert text[0] == "#capmodel v1"
    assert text[1].startswith("labels:\t")


@pytest.mark.parametrize("text, line", [
    ("nope\n", 1),
    ("#capmodel v1\nlabels:\t+\npriors:\t1\nparams:\n", 2),
    ("#capmodel v1\nlabels:\t+\t-\npriors:\t0.5\nparams:\n", 3),
    ("#capmodel v1\nlabels:\t+\t-\npriors:\t0.5\t0.5\nparams:\tbad\n", 4),
    ("#capmodel v1\nlabels:\t+\t-\npriors:\t0.5\t0.5\nparams:\nA\t?\t1\t1\t1\n", 5),
    ("#capmodel v1\nlabels:\t+\t-\npriors:\t0.5\t0.5\nparams:\nA\t+\t1\t1\n", 5),
])
def test_model_parse_errors(text, line):
    with pytest.raises(ModelFormatError, match=f":{line}:"):
        parse_model(text)


def test_labels_with_separators_rejected(toy):
    model = train(toy, 1, 1.0, TOY)
    bad = Model(model.rules, model.priors, type(model.label_names)(["a,b", "c"]),
                model.dictionary, model.params)
    with pytest.raises(ModelFormatError):
        format_model(bad)


def test_sort_rules_precedence(toy):
    rules = [CAR((0,), 0, 0.2, 0.9, 1.0), CAR((0, 1), 0, 0.3, 0.9, 1.0),
             CAR((1,), 1, 0.3, 0.9, 1.0), CAR((2,), 0, 0.9, 0.5, 1.0)]
    out = sort_rules(rules, toy.dictionary)
    assert out == [rules[2], rules[1], rules[0], rules[3]]
    for perm in itertools.permutations(rules):
        assert sort_rules(perm, toy.dictionary) == out
