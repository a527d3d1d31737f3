import json

import pytest

from htnkit.io import DomainClass, classify_domain, parse_domain
from htnkit.io.classify import call_graph

from .conftest import load

HEAD = """(define (domain d)
  (:predicates (p ?x))
  (:operator (!x ?a) (:add (p ?a)))
"""


def test_logistics_is_regular_and_recursive():
    d = load("logistics.htd")
    assert call_graph(d) == {"deliver": {"deliver"}}
    assert classify_domain(d) == DomainClass("regular", "totally-ordered", "with", True)


def test_blocks_is_recursive_and_not_regular():
    # put-on calls three compound tasks in sequence; make-clear calls itself
    d = load("blocks.htd")
    assert call_graph(d) == {"put-on": {"make-clear", "make-table"},
                             "make-clear": {"make-clear", "make-table"},
                             "make-table": set()}
    assert classify_domain(d) == DomainClass("recursive", "totally-ordered", "with", True)


def test_operators_only_domain():
    d, p = load("fig3.htd", "fig3a.htp")
    assert classify_domain(d) == DomainClass("primitive-only", "totally-ordered", "with", False)
    # the problem's network is only partially ordered
    assert classify_domain(d, p).ordering_setting == "partially-ordered"


def test_compound_not_last_breaks_regularity():
    d = parse_domain(HEAD + """  (:method (a ?v)
    (:branch 1 (:network (:tasks (1 (a ?v)) (2 (!x ?v))) (:order (1 2))))))""")
    assert classify_domain(d).compound_setting == "recursive"
    d = parse_domain(HEAD + """  (:method (a ?v)
    (:branch 1 (:network (:tasks (1 (!x ?v)) (2 (a ?v))) (:order (1 2))))))""")
    assert classify_domain(d).compound_setting == "regular"


def test_acyclic_and_ground():
    d = parse_domain(HEAD.replace("(!x ?a) (:add (p ?a))", "(!x) (:add (p k))") + """  (:method (a)
    (:branch 1 (:network (:tasks (1 (b)) (2 (b))))))
  (:method (b) (:branch 1 (:network (:tasks (1 (!x)))))))""")
    assert classify_domain(d) == DomainClass("acyclic", "partially-ordered", "without", False)


def test_method_precondition_variable_counts():
    d = parse_domain(HEAD.replace("(!x ?a) (:add (p ?a))", "(!x) (:add (p k))") + """  (:method (a)
    (:branch 1 (:pre (p ?z)) (:network (:tasks (1 (!x)))))))""")
    assert classify_domain(d).variables == "with"


@pytest.mark.parametrize("name", ["logistics.htd", "logistics-protect.htd", "blocks.htd", "fig3.htd"])
def test_classification_is_stable(name):
    a = json.dumps(classify_domain(load(name)).as_dict(), sort_keys=True)
    b = json.dumps(classify_domain(load(name)).as_dict(), sort_keys=True)
    assert a == b
