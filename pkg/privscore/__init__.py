from .core_model import ROLE
from .core_model import KIND
from .core_model import ROUTE

from .errors import PrivscoreError
from .errors import InputError
from .errors import DagError
from .errors import PartialWarpingError
from .errors import TooManyPlayersError
from .errors import ComputationError
from .errors import SingularDesignError

from .dataset import ColumnSpec
from .dataset import DatasetTable
from .dataset import SplitIndices
from .dataset import load_csv
from .dataset import apply_recipe
from .dataset import split

from .dag import CausalDag
from .dag import PrivilegeArrowSet
from .dag import load_dag

from .scm import ScmSpec
from .scm import PairedSample
from .scm import sample_paired
from .scm import true_ps

from .models import TuningBudget
from .models import FittedPredictor
from .models import FittedGlm
from .models import fit_classifier
from .models import fit_glm
from .models import predict_proba

from .warp import Warper
from .warp import fit_warper
from .warp import warp_row
from .warp import warp_training_set

from .privilege import WorldModels
from .privilege import PsEstimate
from .privilege import BootstrapInterval
from .privilege import build_worlds
from .privilege import estimate_ps
from .privilege import bootstrap_ps
from .privilege import variance_identity_check

from .psc import PscResult
from .psc import StandardShapleyResult
from .psc import bootstrap_psc
from .psc import standard_shapley

from .analytics import RegressionSummary
from .analytics import SubgroupSummary
from .analytics import pfi
from .analytics import psc_importance
from .analytics import subgroup_summary
from .analytics import regress_ps

__all__ = [
        "ROLE",
        "KIND",
        "ROUTE",
        "PrivscoreError",
        "InputError",
        "DagError",
        "PartialWarpingError",
        "TooManyPlayersError",
        "ComputationError",
        "SingularDesignError",
        "ColumnSpec",
        "DatasetTable",
        "SplitIndices",
        "load_csv",
        "apply_recipe",
        "split",
        "CausalDag",
        "PrivilegeArrowSet",
        "load_dag",
        "ScmSpec",
        "PairedSample",
        "sample_paired",
        "true_ps",
        "TuningBudget",
        "FittedPredictor",
        "FittedGlm",
        "fit_classifier",
        "fit_glm",
        "predict_proba",
        "Warper",
        "fit_warper",
        "warp_row",
        "warp_training_set",
        "WorldModels",
        "PsEstimate",
        "BootstrapInterval",
        "build_worlds",
        "estimate_ps",
        "bootstrap_ps",
        "variance_identity_check",
        "PscResult",
        "StandardShapleyResult",
        "bootstrap_psc",
        "standard_shapley",
        "RegressionSummary",
        "SubgroupSummary",
        "pfi",
        "psc_importance",
        "subgroup_summary",
        "regress_ps",
        ]
