import json

import numpy as np

from capclass import synth
from capclass.capgrowth import ExtractionParams
from capclass.coverage import PruneReport, prune_with_report
from capclass.ensemble import sort_rules, train

TOY = ExtractionParams(0.3, 0.51, 0.0)


def test_toy_rules_not_pruned(toy):
    rules = train(toy, 1, 1.0, TOY).rules
    kept, report = prune_with_report(rules, toy)
    assert kept == rules
    assert report.pruned_fraction == 0.0
    # {A,D}=>+ covers t1, t3, t5; C=>- covers t2, t4, t6
    assert report.transactions_covered == 6


def test_duplicate_pruned(toy):
    rules = train(toy, 1, 1.0, TOY).rules
    kept, report = prune_with_report(rules + [rules[1]], toy)
    assert kept == rules
    assert report.pruned_fraction == 1 / 3


def test_empty_report(toy):
    kept, report = prune_with_report([], toy)
    assert kept == []
    assert report == PruneReport(0, 0, 0.0, 0)


def test_report_line_is_json(toy):
    _, report = prune_with_report(train(toy, 1, 1.0, TOY).rules, toy)
    assert json.loads(report.to_line())["rules_out"] == 2


def test_pruned_fraction_bounds():
    d = synth.random_categorical(1500, seed=2)
    rules = sort_rules(train(d, 1, 1.0, ExtractionParams(0.01, 0.5, 0.0)).rules, d.dictionary)
    kept, report = prune_with_report(rules, d)
    assert 0.0 <= report.pruned_fraction <= 1.0
    assert report.rules_out == len(kept) <= len(rules)
    assert report.transactions_covered <= int(np.sum(d.labels >= 0))
