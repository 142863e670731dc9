"""Bagged associative classification with Gini-guided CAP-growth rule extraction."""
from .capgrowth import CAR, ExtractionParams, extract_rules, generate_rule
from .captree import CAPTree, build_caplist, build_captree, itemset_freqs, project
from .dataset import (Dataset, DatasetError, Transaction, Vocabulary, balance_subsample,
                      load_tabular, load_transactions, partition_sample)
from .ensemble import Model, consolidate, coverage_prune, read_model, train, write_model
from .kernels import BACKEND
from .predict import VotingParams, match_rules, predict, score, score_batch

__version__ = "0.1.0"
