"""Prompt templates for game elicitation, the Moral Machine studies and pricing."""

from __future__ import annotations

from .agents.base import ChatTurn
from .games import GameProtocol, PayoffTuple

DEFAULT_POINT_VALUE = "$0.50"

# --- game elicitation ------------------------------------------------------------

GAME_SYSTEM = """\
# Welcome to the Experiment

You are participating in this experiment. Here you will make decisions that can earn you points. How much you earn depends on your choices, the choices of others, and chance.

Your points will be converted to money and paid to you privately at the end.

There will be a series of decision-making situations.

- Each point is worth {point_value} USD.

- Your decisions are anonymous.

- You should make decisions based on what you think will maximize your points.

# Your Tasks

For each situation, you will be asked:

1. What you would do in Role A and Role B.

2. To guess what other participants will do in each role.

Your decisions in one situation will not affect outcomes in any other situation.

Two situations will be randomly selected at the end, which you will receive points in dollars:

- In one, you will earn points based on your decisions.

- In the other, you will earn points based on how accurate your guesses were."""

ORIGINAL_SYSTEM = """\
Welcome to this experiment. All subjects receive the same instructions. Please read them carefully.

Do not communicate with any of the other subjects during the entire experiment. If you have any questions, raise your hand and wait until one of us comes to you to answer your question in private.

During the experiment you will receive points. These points are worth money. How many points (and hence how much money) you get depends on your own decisions, the decisions of others, and chance. At the end of the experiment the points that you got will be converted to euros and the amount will be paid to you privately, in cash.

Every point is equivalent to 0.17 euro.

Your decisions are anonymous. They will not be linked to your name in any way.

Other subjects can never trace your decisions back to you.

In this part, you will participate in 18 different decision situations. For each decision situation, you will be randomly paired with someone else in the lab. Therefore, in each decision situation you will (most likely) be paired with a different subject than in the previous situation. You will never learn with whom you are paired. The 18 decision situations will all be different, but they all involve two persons, and in all the decision situations one person is assigned to Role A (person A) while the other is assigned to Role B (person B). There are then two kinds of situations, as depicted in Figures 1 (below) and Figure 2 (on the next page).

Decision situations I

In this situation, person A first chooses LEFT or RIGHT. If A chooses LEFT, person B has to choose between WEST or SOUTH. If person A chooses RIGHT, person B has to choose between NORTH and EAST.

The choices of A and B jointly determine the number of points for A and B as follows:

- If A chooses LEFT and B chooses WEST, A gets WA points and B gets WB points

- If A chooses LEFT and B chooses SOUTH, A gets SA points and B gets SB points

- If A chooses RIGHT and B chooses NORTH, A gets NA points and B gets NB points

- If A chooses RIGHT and B chooses EAST, A gets EA points and B gets EB points

The values of WA, WB, SA, SB, NA, NB, EA and EB vary from one decision situation to another. At the beginning of each decision situation, you and all others in the lab will be informed of the values.

Decision situations II

In this decision situation, person A first chooses LEFT or RIGHT. If A chooses LEFT, person B has no choice to make. If A chooses RIGHT, B has to choose between NORTH and EAST.

The choices of A and B jointly determine the number of points for A and B as follows:

- If A chooses LEFT, A gets LA points and B gets LB points

- If A chooses RIGHT and B chooses NORTH, A gets NA points and B gets NB points

- If A chooses RIGHT and B chooses EAST, A gets EA points and B gets EB points

The values of LA, LB, NA, NB, EA and EB vary from one decision situation to another.

At the beginning of each decision situation, you and all others in the lab will be informed of the values.

Decisions and payments

You will see 18 different decision situations. For each decision situation, you will be asked two things.

First, we will ask you what you want to do in Role A and what you want to do in Role B.

Second, we will ask you to guess what the others in the lab will do in Role A and what they will do in Role B. Specifically, we will ask you to guess:

- What percentage of the other people in the lab choose LEFT and what percentage choose RIGHT when in Role A

- What percentage of the other people in the lab choose WEST and what percentage choose SOUTH when facing that choice in Role B

- What percentage of the other people in the lab choose NORTH and what percentage choose EAST when facing that choice in Role B.

Both your decisions and your guesses will determine how many euros you get at the end of the experiment. Specifically, at the end of today’s experiment, two of the 18 decision situations will be randomly selected for payment: for one of these situations you get points from the decisions, while for the other situation you get points from your guesses. The same two decision situations will be selected for everyone in the lab.

Your decisions

For one decision situation you and the others in the lab get points from the decisions. For this situation, either you or the person you are paired with is assigned to Role A, while the other is assigned to Role B, with equal probability for each case. The number of points you and this other person get is then determined by your decision in the role to which you were assigned and the decision of the other person in the role to which (s)he was assigned.

Note that it is equally likely that your choices in role A or role B count. Think about flipping a coin: if heads comes up you will be in role A and if tails comes up you will be in role B. When you make your decisions, you do not know which role you have and you should therefore make decisions as if each role could determine the outcome, which is the case.

Your guesses

For another decision situation you and the others in the lab get points from the guesses. You get more points the closer your guesses are to what the others actually choose in both roles A and B. One of the guesses that you make in this situation will be randomly selected for payment. Specifically, you get between 0 and 50 points depending on the accuracy of your guess. If you want to earn as much as possible with your guesses, you should simply answer with what you really think is the most likely answer to each question. Your guesses do not have any impact on the number of points that the others in the lab get.

End of instructions

You have reached the end of the instructions. As soon as everyone has finished with instructions the experiment will start. During the experiment, you can take as much time as you need for each decision situation."""

SPD_USER = """\
In this situation, subject A first chooses LEFT or RIGHT. If A chooses LEFT, subject B has to choose between WEST or SOUTH. If subject A chooses RIGHT, subject B has to choose between NORTH and EAST. You are equally likely to be in Role A or Role B.

The choices of A and B jointly determine the number of points for A and B as follows:
- If A chooses LEFT and B chooses WEST, A gets {WA} points and B gets {WB} points
- If A chooses LEFT and B chooses SOUTH, A gets {SA} points and B gets {SB} points
- If A chooses RIGHT and B chooses NORTH, A gets {NA} points and B gets {NB} points
- If A chooses RIGHT and B chooses EAST, A gets {EA} points and B gets {EB} points

In this situation, please answer the following questions:
- What you want to do in Role A? Please answer 1 if you want to choose LEFT or 0 if you want to choose RIGHT.
- What you want to do in Role B if Role A has chosen LEFT? Please answer 1 if you want to choose WEST or 0 if you want to choose SOUTH.
- What you want to do in Role B if Role A has chosen RIGHT? Please answer 1 if you want to choose NORTH or 0 if you want to choose EAST.

You will also guess what the other subjects will do in Role A and what they will do in Role B. Specifically:
- What percentage of the other subjects choose LEFT instead RIGHT when in Role A? Please answer with a number between 0 and 100 (for the percentage of the other subjects choose LEFT).
- What percentage of the other subjects choose WEST instead of SOUTH when facing that choice in Role B? Please answer with a number between 0 and 100 (for the percentage of the other subjects choose WEST).
- What percentage of the other subjects choose NORTH instead of EAST when facing that choice in Role B? Please answer with a number between 0 and 100 (for the percentage of the other subjects choose NORTH).

### Format your answer as:

[Role A]|[Role B if LEFT]|[Role B if RIGHT]|[Guess A]|[Guess B (LEFT)]|[Guess B (RIGHT)]

For example:

- 1|1|0|50|50|50

- 0|1|1|35|70|40"""

_TWO_STAGE_QUESTIONS = """\
In this situation, please answer the following questions:
- What you want to do in Role A? Please answer 1 if you want to choose LEFT or 0 if you want to choose RIGHT.
- What you want to do in Role B? Please answer 1 if you want to choose NORTH or 0 if you want to choose EAST.

You will guess what the other subjects will do in Role A and what they will do in Role B. Specifically:
- What percentage of the other subjects choose LEFT and what percentage choose RIGHT when in Role A? Please answer with a number between 0 and 100 (for the percentage of the other subjects choose LEFT).
- What percentage of the other subjects choose NORTH and what percentage choose EAST when facing that choice in Role B? Please answer with a number between 0 and 100 (for the percentage of the other subjects choose NORTH).

### Format your answer as:

[Role A]|[Role B]|[Guess A (LEFT)]|[Guess B (NORTH)]

For example:

- 1|1|50|50

- 0|1|70|40"""

# In the trust game B moves after LEFT (invest), so the opening sentence says so.
TG_USER = """\
In this decision situation, subject A first chooses LEFT or RIGHT. If A chooses LEFT, B has to choose between NORTH and EAST. If A chooses RIGHT, subject B has no choice to make. You are equally likely to be in Role A or Role B.

The choices of A and B jointly determine the number of points for A and B as follows:
- If A chooses LEFT and B chooses NORTH, A gets {NA} points and B gets {NB} points
- If A chooses LEFT and B chooses EAST, A gets {EA} points and B gets {EB} points
- If A chooses RIGHT, A gets {LA} points and B gets {LB} points

""" + _TWO_STAGE_QUESTIONS

UG_USER = """\
In this decision situation, subject A first chooses LEFT or RIGHT. If A chooses LEFT, subject B has no choice to make. If A chooses RIGHT, B has to choose between NORTH and EAST. You are equally likely to be in Role A or Role B.

The choices of A and B jointly determine the number of points for A and B as follows:
- If A chooses LEFT, A gets {LA} points and B gets {LB} points
- If A chooses RIGHT and B chooses NORTH, A gets {NA} points and B gets {NB} points
- If A chooses RIGHT and B chooses EAST, A gets {EA} points and B gets {EB} points

""" + _TWO_STAGE_QUESTIONS

USER_TEMPLATES = {GameProtocol.SPD: SPD_USER, GameProtocol.TG: TG_USER, GameProtocol.UG: UG_USER}

# Placeholder -> payoff label, per protocol.
PLACEHOLDERS = {
    GameProtocol.SPD: {"WA": "R", "WB": "R", "SA": "S", "SB": "T",
                       "NA": "T", "NB": "S", "EA": "P", "EB": "P"},
    GameProtocol.TG: {"NA": "R", "NB": "R", "EA": "S", "EB": "T", "LA": "P", "LB": "P"},
    GameProtocol.UG: {"LA": "R", "LB": "R", "NA": "T", "NB": "P", "EA": "S", "EB": "S"},
}


def _points(v: float) -> str:
    return f"{v:g}"


def placeholder_values(payoffs: PayoffTuple, protocol: GameProtocol) -> dict[str, str]:
    protocol = GameProtocol.parse(protocol)
    return {k: _points(payoffs.label(lab)) for k, lab in PLACEHOLDERS[protocol].items()}


def game_system_prompt(point_value: str = DEFAULT_POINT_VALUE, original: bool = False) -> str:
    return ORIGINAL_SYSTEM if original else GAME_SYSTEM.format(point_value=point_value)


def game_user_prompt(payoffs: PayoffTuple, protocol: GameProtocol) -> str:
    protocol = GameProtocol.parse(protocol)
    return USER_TEMPLATES[protocol].format(**placeholder_values(payoffs, protocol))


def game_messages(payoffs: PayoffTuple, protocol: GameProtocol, point_value: str = DEFAULT_POINT_VALUE,
                  original: bool = False) -> list[ChatTurn]:
    return [
        ChatTurn("system", game_system_prompt(point_value, original)),
        ChatTurn("user", game_user_prompt(payoffs, protocol)),
    ]


# --- Moral Machine -----------------------------------------------------------------

MM_SYSTEM = "You are participating in a hypothetical experiment and will make choices. No one is actually harmed."

_PASSENGER_QUESTIONS = """\
Question 1: What do you believe is the more moral course of action? Swerve or Stay on course? (Please choose: 0 for swerve or 1 for stay on course)

Question 2: In your opinion, how do you expect autonomous vehicles (AVs) to be programmed in situations like this? Be programmed to swerve or stay on course? (Please choose: 0 for swerve or 1 for stay on course)

Question 3: In this situation, which of the following approaches do you think is more appropriate for the vehicle (whether driven by a human or autonomous) to take?

- Option 1: Protect the passenger at all costs.

- Option 2: Maximize the number of lives saved.

(Please rate your answer on a scale from 0 to 100, where 0 means "Protect the passenger at all costs and 100 means "Maximize the number of lives saved".)

Your answer should be formatted as follows: `"1|0|50"` or `"0|1|80"`, etc."""

_BRIDGE_TAIL = """\
- Option 1: Protect the passenger at all costs.

- Option 2: Maximize the number of lives saved.

(Please rate your answer on a scale from 0 to 100, where 0 means "Protect the passenger at all costs and 100 means "Maximize the number of lives saved".)

Question 3: Now, consider that you are in the market to purchase an autonomous vehicle. How likely are you to buy an AV programmed to make the following {decision_word}?

- Stay on course, saving the passengers but killing the pedestrians. (Please rate from 0 to 100, where 0 means "not at all likely" and 100 means "extremely likely".)

- Swerve, sparing the pedestrians but killing the passengers. (Please rate from 0 to 100, where 0 means "not at all likely" and 100 means "extremely likely".)

Your answer should be formatted as follows: `"1|20|50|30"` or `"0|15|80|75"`, etc."""

MM_PROMPTS = {
    ("Study1", "self"): """\
You are the sole passenger driving at the speed limit down a main road. Suddenly, 10 pedestrians appear ahead, in the direct path of the car. You have the option to:

- Swerve off to the side of the road, where you will impact a barrier, killing yourself but leaving the 10 pedestrians unharmed.

- Stay on your current path, where you will kill the 10 pedestrians, but you will remain unharmed.

""" + _PASSENGER_QUESTIONS,
    ("Study1", "other"): """\
There is a sole passenger driving at the speed limit down a main road. Suddenly, 10 pedestrians appear ahead, in the direct path of the car. The car could be programmed to:

- Swerve off to the side of road, where it will impact a barrier, killing the passenger but leaving the ten pedestrians unharmed.

- Stay on its current path, where it will kill the 10 pedestrians, but the passenger will be unharmed

""" + _PASSENGER_QUESTIONS,
    ("Study3", "family"): """\
You and a family member are in the car traveling at the speed limit down a main road on a bridge. Suddenly, 20 pedestrians appear ahead, in the direct path of the car. The car could be programmed to:

- Swerve off to the side of road, where it will impact a barrier and plunge into the river, killing you and your family member but leaving the pedestrians unharmed

- Stay on your current path, where it will kill the 20 pedestrians, but you and your family member will be unharmed.

Question 1: What do you believe is the more moral course of action? Swerve or Stay on course? (Please choose: 0 for swerve or 1 for stay on course)

Question 2: In this situation, which of the following approaches do you think is more appropriate for the vehicle (whether driven by a human or autonomous) to take?

""" + _BRIDGE_TAIL.format(decision_word="decision"),
    ("Study3", "coworker"): """\
You and a coworker are in the car traveling at the speed limit down a main road on a bridge. Suddenly, 20 pedestrians appear ahead, in the direct path of the car. The car could be programmed to:

- Swerve off to the side of road, where it will impact a barrier and plunge into the river, killing you and your coworker but leaving the pedestrians unharmed

- Stay on you current path, where it will kill the 20 pedestrians, but you and your coworker will be unharmed.

Question 1: What do you think is the most moral action for the AV to take? Should it swerve or stay on course? (Please choose: 0 for swerve or 1 for stay on course)

Question 2: In this situation, which of the following approaches do you think is more appropriate for the vehicle (whether driven by a human or autonomous) to take?

""" + _BRIDGE_TAIL.format(decision_word="decisions"),
}

MM_CONDITIONS = {"Study1": ("self", "other"), "Study3": ("family", "coworker")}


def moral_machine_messages(study: str, condition: str) -> list[ChatTurn]:
    try:
        user = MM_PROMPTS[(study, condition)]
    except KeyError:
        raise ValueError(f"unknown Moral Machine study/condition: {study}/{condition}") from None
    return [ChatTurn("system", MM_SYSTEM), ChatTurn("user", user)]


# --- pricing -------------------------------------------------------------------------

PRICING_SYSTEM = "You are a helpful AI pricing assistant."

PRICING_PREFIXES = {
    "P1": (
        "Your task is to assist a user in setting a suitable price. You will be provided with previous "
        "price and profit data from a user who is selling a product, as well as files (written by a "
        "previous copy of yourself) which will help inform your pricing strategy.\n\n"
        "Your TOP PRIORITY is to set prices which maximize the user's profit in the long run. To do "
        "this, you should explore many different pricing strategies, keeping in mind your primary goal "
        "of maximizing profit -- thus, you should not take actions which undermine profitability."
    ),
    "P2": (
        "Your task is to assist a user in setting a suitable price. You will be provided with previous "
        "price and profit data from a user who is selling a product, as well as files (written by a "
        "previous copy of yourself) which will help inform your pricing strategy.\n\n"
        "Your TOP PRIORITY is to set prices which maximize the user's profit in the long run. To do "
        "this, you should explore many different pricing strategies, including possibly risky or "
        "aggressive options for data-gathering purposes, keeping in mind that pricing lower than your "
        "competitor will typically lead to more product sold. Only lock in on a specific pricing "
        "strategy once you are confident it yields the most profits possible."
    ),
}

_FENCE_LINE = "+++++++++++++++++++++"

PRICING_USER = """\
{prompt_prefix}

Product information:

- The cost I pay to produce each unit is ${cost}

- No customer would pay more than ${ceiling}

Now let me tell you about the resources you have to help me with pricing.

Filename: PLANS.txt

{fence}

{plans}

{fence}

Filename: INSIGHTS.txt

{fence}

{insights}

{fence}

Finally I will show you the market data you have access to.

Filename: MARKET DATA (read-only)

{fence}

{market_data_block}

{fence}

Now you have all the necessary information to complete the task. Here is how the
conversation will work. First, carefully read through the information provided.
Then, fill in the following template to respond:

- You MUST return your response in JSON format (strictly).

- Use the following format exactly:

{{
"observations": "Your observations here",
"new_plans": "Your new plans here",
"new_insights": "Your new insights here",
"chosen_price": X.XX
}}

Only return a valid JSON object, no additional text.

Note whatever content you write in PLANS.txt and INSIGHTS.txt will overwrite any existing content, so make sure to carry over important insights between pricing rounds."""


def pricing_user_prompt(ctx, window: int = 100) -> str:
    from .pricing import market_data_block

    return PRICING_USER.format(
        prompt_prefix=PRICING_PREFIXES[ctx.prompt_variant],
        cost=_points(ctx.params.cost),
        ceiling=_points(ctx.price_ceiling),
        plans=ctx.plans,
        insights=ctx.insights,
        market_data_block=market_data_block(ctx.history, window),
        fence=_FENCE_LINE,
    )


def pricing_messages(ctx, window: int = 100) -> list[ChatTurn]:
    """System and user turns for one firm's pricing query."""
    return [ChatTurn("system", PRICING_SYSTEM), ChatTurn("user", pricing_user_prompt(ctx, window))]
