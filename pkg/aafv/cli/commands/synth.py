import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from aafv.core.config import format_errors, settings
from aafv.core.errors import ConfigValidationError
from aafv.data.csvio import write_csv, write_dataset
from aafv.data.synth import synth_biased_shards
from aafv.schemas.schemas import SynthSpec

logger = logging.getLogger(__name__)

SPEC_FLAGS = {
    "n_samples": int,
    "n_features": int,
    "n_clients": int,
    "bias_strength": float,
    "label_noise": float,
    "test_fraction": float,
    "unlabeled_fraction": float,
    "seed": int,
}


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="Write a synthetic biased-shard dataset as CSV files")
    for name, kind in SPEC_FLAGS.items():
        default = SynthSpec.model_fields[name].default
        parser.add_argument(
            f"--{name.replace('_', '-')}", dest=name, type=kind, default=None, help=f"default {default}"
        )
    parser.add_argument("--out-dir", default=None, help="Directory for the CSV files")
    parser.set_defaults(handler=cmd_synth)


def cmd_synth(args: argparse.Namespace) -> int:
    """
    Write test.csv, unlabeled.csv (features only) and client_<k>.csv.

    Files are byte-identical for the same flags and seed.
    """
    values = {name: getattr(args, name) for name in SPEC_FLAGS if getattr(args, name) is not None}
    try:
        spec = SynthSpec.model_validate(values)
    except ValidationError as exc:
        raise ConfigValidationError(format_errors(exc), "synth flags") from exc

    out_dir = Path(args.out_dir or settings.OUTPUT_DIR)
    parts = synth_biased_shards(spec)
    write_dataset(out_dir / "test.csv", parts.test)
    write_csv(out_dir / "unlabeled.csv", parts.unlabeled.features)
    for k, shard in enumerate(parts.clients):
        write_dataset(out_dir / f"client_{k}.csv", shard)
    logger.info(f"Wrote {2 + len(parts.clients)} CSV files to {out_dir}")
    return 0
