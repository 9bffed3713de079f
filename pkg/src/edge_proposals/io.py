"""
File formats: edge lists, label tables, feature matrices, proposal sets,
splits, and the JSON/CSV result writers.

Edge list: UTF-8 TSV `u<TAB>v[<TAB>timestamp]`, `#` lines are comments.
Label table: TSV `label<TAB>id`. Proposal set: TSV `u<TAB>v<TAB>score`
sorted descending, with a JSON sidecar. Split: five edge lists plus
`split.json`.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .errors import GraphValidationError, SplitError
from .graph import EdgeList, as_pairs
from .models.base import FeatureMatrix
from .proposal import ProposalSet
from .splits import EdgeSplit

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SPLIT_FILES = ("train_pos", "valid_pos", "test_pos", "valid_neg", "test_neg")
FLOAT_FORMAT = "%.12g"
EXACT_FLOAT_FORMAT = "%.17g"


def _to_builtin(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_builtin(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return None if math.isnan(value) else ("inf" if math.isinf(value) else value)
    return obj


def write_json(path: PathLike, payload: Dict[str, Any]) -> None:
    """Stable JSON: sorted keys, fixed indentation, numpy values converted."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_to_builtin(payload), handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_csv(path: PathLike, frame: pd.DataFrame) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class LabelTable:
    """Maps arbitrary node labels to dense 0-based ids, in first-seen order."""

    def __init__(self, mapping: Optional[Dict[str, int]] = None):
        self.mapping: Dict[str, int] = dict(mapping or {})

    def id_for(self, label: str) -> int:
        if label not in self.mapping:
            self.mapping[label] = len(self.mapping)
        return self.mapping[label]

    def __len__(self) -> int:
        return len(self.mapping)

    def write(self, path: PathLike) -> None:
        frame = pd.DataFrame(sorted(self.mapping.items(), key=lambda kv: kv[1]), columns=["label", "id"])
        frame.to_csv(path, sep="\t", header=False, index=False, lineterminator="\n")

    @classmethod
    def read(cls, path: PathLike) -> "LabelTable":
        frame = pd.read_csv(path, sep="\t", header=None, names=["label", "id"], dtype={"label": str, "id": int},
                            keep_default_na=False)
        return cls(dict(zip(frame["label"], frame["id"])))


def _read_rows(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path, sep="\t", header=None, comment="#", dtype=str, keep_default_na=False,
                           skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=[0, 1])


def read_edge_list(path: PathLike, labels: Optional[LabelTable] = None) -> Tuple[EdgeList, Optional[LabelTable]]:
    """
    Read an edge list. Integer tokens are used as node ids directly unless a
    label table is given or some token is not an integer, in which case every
    token is mapped through a (possibly new) label table.
    """
    frame = _read_rows(path)
    if frame.shape[1] not in (2, 3):
        raise GraphValidationError(f"{path}: expected 2 or 3 tab-separated columns, got {frame.shape[1]}")
    tokens = frame.iloc[:, :2].apply(lambda col: col.str.strip())
    numeric = tokens.apply(lambda col: col.str.fullmatch(r"\d+")).all().all()
    if numeric and labels is None:
        src = tokens[0].astype(np.int64).to_numpy()
        dst = tokens[1].astype(np.int64).to_numpy()
    else:
        labels = labels or LabelTable()
        # ids follow first appearance, row by row
        ids = [(labels.id_for(a), labels.id_for(b)) for a, b in zip(tokens[0], tokens[1])]
        src = np.array([a for a, _ in ids], dtype=np.int64)
        dst = np.array([b for _, b in ids], dtype=np.int64)
    timestamps = None
    if frame.shape[1] == 3:
        try:
            timestamps = frame[2].astype(np.int64).to_numpy()
        except ValueError:
            raise GraphValidationError(f"{path}: timestamp column must hold integers")
    return EdgeList(src=src, dst=dst, timestamps=timestamps), labels


def write_edge_list(path: PathLike, pairs, timestamps: Optional[np.ndarray] = None) -> None:
    arr = as_pairs(pairs)
    frame = pd.DataFrame({"u": arr[:, 0], "v": arr[:, 1]})
    if timestamps is not None:
        frame["timestamp"] = np.asarray(timestamps, dtype=np.int64)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("# " + "\t".join(frame.columns) + "\n")
        frame.to_csv(handle, sep="\t", header=False, index=False, lineterminator="\n")


def num_nodes_hint(edges: EdgeList, labels: Optional[LabelTable] = None) -> int:
    if labels is not None:
        return len(labels)
    if len(edges) == 0:
        return 0
    return int(max(edges.src.max(), edges.dst.max())) + 1


def read_feature_matrix(path: PathLike, num_nodes: int) -> FeatureMatrix:
    """CSV with the node id in the first column; a header row is optional."""
    frame = pd.read_csv(path, header=None, dtype=str)
    if len(frame) and not str(frame.iloc[0, 0]).strip().isdigit():
        frame = frame.iloc[1:]
    ids = frame.iloc[:, 0].astype(np.int64).to_numpy()
    values = frame.iloc[:, 1:].astype(np.float64).to_numpy()
    if len(ids) != num_nodes or set(ids.tolist()) != set(range(num_nodes)):
        raise GraphValidationError(f"{path}: expected one feature row for each of {num_nodes} nodes")
    return FeatureMatrix(values[np.argsort(ids)])


def write_feature_matrix(path: PathLike, features: FeatureMatrix) -> None:
    frame = pd.DataFrame(features.rows, columns=[f"f{i}" for i in range(features.dim)])
    frame.insert(0, "node", np.arange(features.num_nodes))
    write_csv(path, frame)


def proposal_sidecar(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def write_proposal_set(path: PathLike, p: ProposalSet, meta: Optional[Dict[str, Any]] = None) -> None:
    frame = pd.DataFrame({"u": p.pairs[:, 0], "v": p.pairs[:, 1], "score": p.scores})
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep="\t", header=False, index=False, float_format=EXACT_FLOAT_FORMAT, lineterminator="\n")
    write_json(proposal_sidecar(path), {**p.provenance, "size": len(p),
                                        "target_size_hint": p.target_size_hint, **(meta or {})})


def read_proposal_set(path: PathLike) -> ProposalSet:
    """Read a proposal TSV (ours or an external/expert one); rows are re-sorted by rank."""
    frame = _read_rows(path)
    if len(frame) and frame.shape[1] != 3:
        raise GraphValidationError(f"{path}: proposal rows need u, v and score columns")
    pairs = frame.iloc[:, :2].astype(np.int64).to_numpy() if len(frame) else np.empty((0, 2), np.int64)
    scores = frame.iloc[:, 2].astype(np.float64).to_numpy() if len(frame) else np.empty(0)
    sidecar = proposal_sidecar(path)
    provenance = read_json(sidecar) if sidecar.exists() else {"source": str(path)}
    hint = provenance.get("target_size_hint")
    return ProposalSet.from_unsorted(pairs, scores, provenance, hint)


def write_split(directory: PathLike, split: EdgeSplit) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_FILES:
        write_edge_list(directory / f"{name}.tsv", getattr(split, name))
    write_json(directory / "split.json", {
        "kind": split.split_kind,
        "num_nodes": split.num_nodes,
        "sizes": split.sizes(),
        **split.meta,
    })


def read_split(directory: PathLike) -> EdgeSplit:
    directory = Path(directory)
    manifest_path = directory / "split.json"
    if not manifest_path.exists():
        raise SplitError(f"No split manifest at {manifest_path}")
    manifest = read_json(manifest_path)
    parts = {}
    for name in SPLIT_FILES:
        edges, _ = read_edge_list(directory / f"{name}.tsv")
        parts[name] = edges.pairs()
    meta = {k: v for k, v in manifest.items() if k not in ("kind", "num_nodes", "sizes")}
    return EdgeSplit(num_nodes=int(manifest["num_nodes"]), split_kind=manifest["kind"], meta=meta, **parts)
