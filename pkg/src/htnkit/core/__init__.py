"""First-order vocabulary, states, operators, task networks and decomposition."""
from .errors import *  # noqa: F401,F403
from .model import (INIT, PHANTOM, Action, Binding, Budget, DecompositionRecord, Domain,
                    Method, Operator, Plan, Problem, SourceSpan, StateConstraint,
                    TaskInstance, TaskNetwork, id_key, is_primitive)
from .ops import (Fresh, Replay, applicable, apply, decompose_po, decompose_state,
                  executable, missing_precondition, rename_fresh, satisfying_bindings)
from .state import State
from .terms import (Atom, fmt_atom, fmt_pred, ground, is_ground, is_var, match_args, normalize,
                    unify)
