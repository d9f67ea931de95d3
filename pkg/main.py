import functools
import logging

import click

from errors import GemError
from runner.run_config import load_run_config
from runner.runner import Runner

log = logging.getLogger("gemfm")


def common_options(command):
    """Flags shared by every command."""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="Flat YAML file of settings; flags override it."),
        click.option("--seed", type=int, help="Seed for every random stream."),
        click.option("--threads", type=int, help="Worker threads for scoring (default 1)."),
        click.option("--data", type=click.Path(dir_okay=False), help="libFM data file."),
        click.option("--field-map", type=click.Path(dir_okay=False),
                     help="Tab-separated 'field start end' file."),
        click.option("--model", type=click.Path(dir_okay=False), help="Model checkpoint path."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output file."),
        click.option("--report", type=click.Path(dir_okay=False),
                     help="Write the effective configuration and results here."),
        click.option("--verbose", is_flag=True, help="Debug logging."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def graph_options(command):
    options = [
        click.option("--split", help="Train/validation/test ratios, e.g. 0.8,0.1,0.1."),
        click.option("--graph", type=click.Path(dir_okay=False), help="Edge-list graph file."),
        click.option("--graph-mode", type=click.Choice(["all_pairs", "pair_list"])),
        click.option("--graph-fields", help="Comma-separated fields that carry edges."),
        click.option("--field-pairs", help="Comma-separated field pairs, e.g. user:item."),
        click.option("--low-cardinality-threshold", type=int),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def run_command(method_name):
    """Build the effective config from file + flags and run one Runner method."""

    def decorator(command):
        @functools.wraps(command)
        def wrapper(config_path, verbose, **flags):
            logging.basicConfig(
                level=logging.DEBUG if verbose else logging.INFO,
                format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            )
            try:
                run_config = load_run_config(config_path, flags)
                return getattr(Runner(run_config), method_name)()
            except (GemError, OSError, ValueError) as e:
                log.debug("Command failed", exc_info=True)
                raise click.ClickException(str(e)) from e

        return wrapper

    return decorator


@click.group()
def cli():
    """Factorization machines with graph-convolved feature embeddings."""


@cli.command("build-graph")
@common_options
@graph_options
@click.option("--train-data", type=click.Path(dir_okay=False),
              help="Pre-split training file; used whole instead of splitting --data.")
@run_command("build_graph")
def build_graph_command(**flags):
    """Build the feature co-occurrence graph from the training data."""


@cli.command("train")
@common_options
@graph_options
@click.option("--train-data", type=click.Path(dir_okay=False))
@click.option("--valid-data", type=click.Path(dir_okay=False))
@click.option("--test-data", type=click.Path(dir_okay=False))
@click.option("--embedding-dim", type=int)
@click.option("--layers", type=int, help="Graph convolution layers; 0 trains plain FM.")
@click.option("--activation", type=click.Choice(["identity", "relu"]))
@click.option("--optimizer", type=click.Choice(["adagrad", "adam"]))
@click.option("--learning-rate", type=float)
@click.option("--l2-lambda", type=float)
@click.option("--dropout-ratio", type=float)
@click.option("--interaction-dropout", type=float)
@click.option("--batch-size", type=int)
@click.option("--max-epochs", type=int)
@click.option("--patience", type=int)
@click.option("--sampling-ratio", type=float)
@click.option("--metric-for-stopping", type=click.Choice(["rmse", "mae"]))
@click.option("--regularize-bias", type=click.BOOL)
@click.option("--full-decay", type=click.BOOL)
@click.option("--init-std", type=float)
@click.option("--clip-predictions", type=click.BOOL)
@run_command("train")
def train_command(**flags):
    """Train an FM (--layers 0) or GEM model and write checkpoint and report."""


@cli.command("evaluate")
@common_options
@click.option("--clip-predictions", type=click.BOOL)
@run_command("evaluate")
def evaluate_command(**flags):
    """Print rmse / mae / n / params of a checkpoint on a data file."""


@cli.command("predict")
@common_options
@click.option("--clip-predictions", type=click.BOOL)
@run_command("predict")
def predict_command(**flags):
    """Write one prediction per input line."""


@cli.command("negative-sample")
@common_options
@click.option("--item-field", help="Field whose feature is replaced in negatives.")
@click.option("--negatives-per-positive", "negatives_per_positive", type=int)
@click.option("--negative-label", type=float)
@run_command("negative_sample")
def negative_sample_command(**flags):
    """Append k negatives per positive, drawn from items unclicked under the same context."""


if __name__ == "__main__":
    cli()
