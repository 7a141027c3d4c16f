"""Galois extensions of p-adic fields, ramification, formal groups and cohomological triviality checks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    LocalCTError,
    ParseError,
    PrecisionLoss,
)
from .padic import PAdicApprox, hensel_lift  # noqa: E402
from .finite_field import FqDescriptor  # noqa: E402
from .tower import FieldTower, TowerElement, build_tower  # noqa: E402
from .galois import AutomorphismTable, galois_group  # noqa: E402
from .ramification import (  # noqa: E402
    RamificationData,
    classify_ramification,
    herbrand_phi,
    herbrand_psi,
    ramification_filtration,
)
from .series import TruncSeries  # noqa: E402
from .formal_groups import (  # noqa: E402
    FormalGroupLaw,
    elliptic_law,
    fgl_verify_axioms,
    hazewinkel_residual,
    lubin_tate_law,
    make_law,
)
from .cohomology import (  # noqa: E402
    CT,
    NOT_CT,
    UNDETERMINED,
    ct_crosscheck,
    ct_verdict,
    full_unit_index,
    invariant_level,
    norm_image_level,
    tate_cohomology,
)
from .elliptic import WeierstrassCurve, norm_surjectivity_certificate, reduction_type  # noqa: E402
from .config import ScenarioConfig, load_config, parse_config  # noqa: E402
from .suite import VerificationReport, emit_report, parse_report, run_suite  # noqa: E402
