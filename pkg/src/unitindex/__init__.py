"""Units of product systems of Hilbert modules, modelled through their
kernel generators over finite-dimensional C*-algebras."""
from .algebra import (
    Algebra,
    Element,
    SuperOp,
    cstar_norm,
    is_positive,
    super_exp,
    tensor_algebra,
    tensor_elements,
    tensor_superops,
)
from .errors import *  # noqa: F401,F403
from .examples import FockSpec, FockUnit, TwistedSpec, fock_system, random_ce_system, twisted_system
from .index import (
    central_check,
    check_skp,
    christensen_evans,
    index_report,
    inner,
    recenter,
    sim_implies_shift,
    splitting_j,
)
from .kernels import KernelSystem, check_ccpd, new_kernel_system, semigroup_eval
from .tensor import check_otimes, embed_T, tensor_system
from .units import (
    Base,
    LeftCombo,
    RightCombo,
    Shift,
    add,
    check_module_axioms,
    eval_kernel,
    mul_left,
    mul_right,
    neg,
    normalize,
    sub,
    translate,
    units_equal,
)

__version__ = "0.1.0"
