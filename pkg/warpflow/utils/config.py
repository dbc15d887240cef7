from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import rich
from omegaconf import DictConfig
from omegaconf import OmegaConf
from rich.syntax import Syntax
from rich.tree import Tree

# sections of a scenario in the order they are consumed by a run
SECTION_ORDER = ("base", "warp", "grid", "initial", "flow", "monitors", "profile", "output")


def _sections(keys: Sequence[str]) -> List[str]:
    ordered = [k for k in SECTION_ORDER if k in keys]
    return ordered + [k for k in keys if k not in ordered]


def print_config(
    config: DictConfig,
    resolve: bool = True,
    exclude: Optional[Sequence[str]] = None,
) -> None:
    """
    Print a scenario (or the composed hydra config) as a rich tree: one branch holding the
    top-level scalars, then one YAML branch per section.

    Parameters
    ----------
    config
        Config to print. A hydra config holding a `scenario` node is printed section by section
        of that scenario, its other top-level entries going to the first branch.
    resolve
        Resolve interpolations before printing. Failing interpolations are printed unresolved.
    exclude
        Top-level keys left out.
    """
    exclude = list(exclude or [])
    style = "dim"
    tree = Tree(":gear: CONFIG", style=style, guide_style=style)

    scalars: Dict[str, object] = {}
    nodes: Dict[str, object] = {}
    scenario = config.get("scenario")
    sources = [config, scenario] if isinstance(scenario, DictConfig) else [config]
    for source in sources:
        for key in source.keys():
            if key == "scenario" or key in exclude:
                continue
            value = source.get(key)
            (nodes if isinstance(value, DictConfig) else scalars)[key] = value

    root = tree.add("run", style=style, guide_style=style)
    root.add(Syntax(OmegaConf.to_yaml(OmegaConf.create(scalars)), "yaml", word_wrap=True))
    for key in _sections(list(nodes)):
        try:
            content = OmegaConf.to_yaml(nodes[key], resolve=resolve)
        except Exception:
            content = OmegaConf.to_yaml(nodes[key], resolve=False)
        branch = tree.add(key, style=style, guide_style=style)
        branch.add(Syntax(content, "yaml", indent_guides=True, word_wrap=True))

    rich.print(tree)
