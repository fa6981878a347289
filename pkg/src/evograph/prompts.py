"""Prompt templates for the vision-chat evolutionary operators.

Each prompt has two halves: a context-setting part (sent as the system
message) and an output directive (sent with the images as the user message).
Init and crossover directives get an explicit seed-count sentence appended,
since no backend can satisfy the size checks without knowing k.
"""

from __future__ import annotations

INIT_CONTEXT = (
    "You are an expert in network science and will be provided with one "
    "network in the form of an image. Please help me intelligently select "
    "nodes as the diffusion seeds in this network to achieve influence "
    "maximization."
)

INIT_AGENTS = {
    "init_intelligent": {
        "context": INIT_CONTEXT,
        "directive": "Only provide a list of node indices separated by commas.",
    },
    "init_betweenness_spread": {
        "context": INIT_CONTEXT,
        "directive": (
            "Here are some tips: (1) Choose large-betweenness nodes. "
            "(2) Pick nodes spread across different center parts of the "
            "network. Only provide a list of node indices separated by commas."
        ),
    },
    "init_degree_central": {
        "context": INIT_CONTEXT,
        "directive": (
            "Here are some tips: (1) Choose large-degree nodes. "
            "(2) Pick nodes at the center place of the network. "
            "Only provide a list of node indices separated by commas."
        ),
    },
}

CROSSOVER_CONTEXT = (
    "Examine a network image where seed nodes are distinctly labeled. "
    "Carefully analyze the seed nodes present in each network image and "
    "suggest an optimal set of seed nodes that harness the advantages of "
    "both parent networks to maximize influence spread."
)

CROSSOVER_DIRECTIVE = (
    "Focus on selecting high-degree nodes or nodes in strategic positions "
    "that significantly enhance network connectivity. Provide your answer "
    "as a list of node indices, separated by commas."
)

MUTATION_CONTEXT = (
    "Examine a network image where seed nodes are colored and non-seed "
    "nodes are labeled in white."
)

MUTATION_REMOVAL_CONTEXT = (
    MUTATION_CONTEXT
    + " Identify the current seed node that contributes the least to "
    "influence maximization."
)

MUTATION_REMOVAL_DIRECTIVE = (
    "Focus on nodes that appear trivial or less connected. "
    "Provide the index of this node."
)

MUTATION_ADDITION_CONTEXT = (
    MUTATION_CONTEXT
    + " Propose a non-seed node that could significantly increase the "
    "network's influence spread."
)

MUTATION_ADDITION_DIRECTIVE = (
    "Focus on nodes with higher degrees or strategically critical positions "
    "in the network. Provide the index of this node."
)

MUTATION_ONESHOT_CONTEXT = (
    MUTATION_CONTEXT
    + " Identify the current seed node that contributes the least to "
    "influence maximization and propose a non-seed node in white that could "
    "significantly increase the network's influence spread."
)

MUTATION_ONESHOT_DIRECTIVE = (
    "Provide the answer as a list: the first element is the index of the "
    "seed node to remove, and the second element is the index of the "
    "non-seed node to add."
)


def _with_count(directive: str, k: int) -> str:
    return f"{directive} Select exactly {k} nodes."


def init_prompt(agent: str, k: int) -> tuple[str, str]:
    spec = INIT_AGENTS[agent]
    return spec["context"], _with_count(spec["directive"], k)


def crossover_prompt(k: int) -> tuple[str, str]:
    return CROSSOVER_CONTEXT, _with_count(CROSSOVER_DIRECTIVE, k)


def mutation_removal_prompt() -> tuple[str, str]:
    return MUTATION_REMOVAL_CONTEXT, MUTATION_REMOVAL_DIRECTIVE


def mutation_addition_prompt() -> tuple[str, str]:
    return MUTATION_ADDITION_CONTEXT, MUTATION_ADDITION_DIRECTIVE


def mutation_oneshot_prompt() -> tuple[str, str]:
    return MUTATION_ONESHOT_CONTEXT, MUTATION_ONESHOT_DIRECTIVE
