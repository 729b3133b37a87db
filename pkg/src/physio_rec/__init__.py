"""Tourist activity recommendations from wearable-sensor physiological conditions."""

from .condition_inference import (
    Condition,
    ConditionVector,
    InferenceParams,
    infer_conditions,
    validate_params,
)
from .errors import (
    ConfigError,
    ContractError,
    ParseError,
    PhysioRecError,
    SchemaError,
    SensorValidationError,
)
from .recommender_core import (
    ActivityCategory,
    AriVector,
    TriggerParams,
    UserPreferences,
    Venue,
    WeightMatrix,
    compute_ari,
    rank_items,
    select_category,
    should_push,
)
from .sensor_stream import Channel, SensorSample, WindowSpec, WindowedFeatures, parse_sensor_log, window
from .tourist_sim import SimConfig, emit_sensor_log, evaluate_policy, generate_trajectory, sample_choice
from .weight_learning import (
    FeedbackEvent,
    LearningParams,
    SignPrior,
    default_sign_prior,
    fit,
    init_weights,
    update,
)

__version__ = "0.1.0"
