from .base import AgentBackend, AgentRequest, ChatTurn
from .client import (
    AuthFailure,
    ChatCompletionClient,
    CompletionConfig,
    CompletionError,
    CompletionTimeout,
    ExhaustedRetries,
)
from .parsing import (
    FormatError,
    GameResponse,
    MoralMachineResponse,
    PricingDecision,
    PricingFormatError,
    parse_game_response,
    parse_moral_machine_response,
    parse_pricing_response,
)
from .scripted import (
    CallableAgent,
    ConstantPrice,
    FixedText,
    MyopicBestResponse,
    OptimalGamePlayer,
    UndercutByDelta,
)
