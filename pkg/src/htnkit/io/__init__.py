"""Domain language: reader, parser, printer, classifier and plan output."""
from .classify import DomainClass, classify_domain
from .parser import parse_domain, parse_problem
from .printer import print_domain, print_problem
from .sexpr import ParseError, ParseErrors
