"""matstage: staging area and curation workflow for machine-extracted
superconductor records (material, critical temperature, applied pressure)."""

from .anomaly import AnomalyFlag, AnomalyRule, AnomalyScanner, check_record, detect_multi_tc
from .collector import TrainingCollector
from .errors import (
    ConflictError,
    ForbiddenTransitionError,
    NotFoundError,
    StagingError,
    StaleVersionError,
    ValidationError,
)
from .ingest import ExtractionPayload, Ingestor, parse_payload
from .metrics import (
    EvalRow,
    EvalScores,
    audit_rows,
    group_scores,
    load_eval_table,
    macro_average,
    score_counts,
)
from .model import (
    ActionKind,
    Agent,
    CurationLogEntry,
    CurationState,
    EntityLabel,
    ErrorType,
    ExampleStatus,
    LayoutToken,
    MaterialRecord,
    Passage,
    ProcessingLogEntry,
    Span,
    Status,
    TrainingExample,
    is_visible,
    make_record,
)
from .parsing import (
    Composition,
    CompositionOutcome,
    Quantity,
    QuantityParseError,
    Unit,
    normalize_formula,
    parse_composition,
    parse_pressure,
    parse_temperature,
)
from .store import Page, Query, RecordStore
from .workflow import (
    CurationAction,
    CurationEngine,
    allowed_actions,
)

__version__ = "0.1.0"
