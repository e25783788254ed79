"""
Prefect flow regenerating every figure dataset.
- Runs the CLI pipeline once per checked-in config in configs/figures/
- Writes one CSV/JSON file per config into the output directory
- Logs every file written
"""

from pathlib import Path
from typing import List, Optional

from prefect import flow, task
from typer.main import get_command

from cli.main import app
from cli.run_config import load_run_config
from configs.config import AppConfig
from core.errors import ConfigError
from utils.logger import setup_logger

logger = setup_logger(__name__)

# Commands that emit a single document default to JSON.
DOCUMENT_COMMANDS = ("trap", "regime")


@task
def render_figure(config_path: str, out_dir: str) -> str:
    """Run the command named by task.kind and write <config stem>.<format> to out_dir."""
    run = load_run_config(config_path)
    kind = run.task.kind
    if kind is None:
        raise ConfigError(f"{config_path}: figure configs must set task.kind")
    fmt = run.output.format or ("json" if kind in DOCUMENT_COMMANDS else "csv")
    out = Path(out_dir) / f"{Path(config_path).stem}.{fmt}"

    code = get_command(app).main(
        args=["--config", str(config_path), "--out", str(out), "--format", fmt, kind],
        standalone_mode=False,
    )
    if code not in (None, 0):
        raise RuntimeError(f"{config_path}: '{kind}' exited with code {code}")
    logger.info(f"Figure data written: {out}")
    return str(out)


@flow(name="Reproduce Figure Data")
def reproduce_figures(
    figures_dir: Optional[str] = None, out_dir: Optional[str] = None
) -> List[str]:
    settings = AppConfig()
    source = Path(figures_dir or settings.FIGURES_DIR)
    target = Path(out_dir or settings.OUTPUT_DIR)
    configs = sorted(source.glob("*.json"))
    logger.info(f"Rendering {len(configs)} figure configs from {source} into {target}")
    return [render_figure(str(path), str(target)) for path in configs]


if __name__ == "__main__":
    reproduce_figures()
