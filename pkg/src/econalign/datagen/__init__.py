from .dataset import (
    COMPARISON_TYPES,
    Dataset,
    DatasetExhausted,
    DatasetSpec,
    default_alternatives,
    generate_dataset,
    identifiability_census,
    is_identifiable,
    parse_generator_agent,
    sample_payoffs,
)
from .render import ChatExample, render_example
from .validate import ValidationError, check_arithmetic, validate_file, validate_line
