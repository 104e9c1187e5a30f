"""JSON schemas and deterministic serialization.

All writers sort keys, quantize floats to 6 decimal places and end with a
newline, so identical inputs produce byte-identical files. Loaders
validate the minimal schema and raise SchemaError on malformed input.

Schemas:
  detections : {image, detections: [{class, score, bbox: [x0,y0,x1,y1]}]}
  annotations: {image, width, height,
                objects: [{id, class, bbox, text?, words?}]}
  table      : {rows: [...], cols: [...], values: [[number|null, ...], ...]}
  manifest   : {plots: [{image, annotations, table, seed}]}
  proposals  : {image, width, height,
                proposals: [{id, bbox, source_contour}],
                targets?: [{proposal, class, regression_box?, links}]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .geometry import Box
from .linking import DIRECTIONS
from .raster import Proposal, RasterImage
from .table import PlotTable
from .targets import Annotation, ObjectClass, ProposalTargets


class SchemaError(ValueError):
    pass


def q6(x: float) -> float:
    """Quantize to 6 decimal places (keeps JSON output reproducible)."""
    return float(f"{float(x):.6f}")


def box_to_list(box: Box) -> list[float]:
    return [q6(box.x0), q6(box.y0), q6(box.x1), q6(box.y1)]


def box_from_list(raw) -> Box:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise SchemaError(f"bbox must be a 4-list, got {raw!r}")
    try:
        return Box(*(float(v) for v in raw))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad bbox {raw!r}: {exc}") from exc


def class_from_label(label) -> ObjectClass:
    try:
        return ObjectClass(label)
    except ValueError as exc:
        raise SchemaError(f"unknown object class {label!r}") from exc


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(dump_json(obj), encoding="utf-8")
    tmp.replace(path)


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc


def write_png(path, img: RasterImage) -> None:
    from PIL import Image

    tmp = Path(str(path) + ".tmp")
    Image.fromarray(img.array).save(tmp, format="PNG", optimize=False)
    tmp.replace(path)


# -- detections ----------------------------------------------------------

def detections_to_obj(image_name: str, detections) -> dict:
    return {
        "image": image_name,
        "detections": [
            {"class": d.cls.value, "score": q6(d.score),
             "bbox": box_to_list(d.box)}
            for d in detections
        ],
    }


def detections_from_obj(obj):
    from .detector import Detection

    if not isinstance(obj, dict) or "detections" not in obj:
        raise SchemaError("detection file needs a 'detections' list")
    out = []
    for rec in obj["detections"]:
        if "class" not in rec or "bbox" not in rec:
            raise SchemaError(f"detection record missing keys: {rec!r}")
        out.append(Detection(box_from_list(rec["bbox"]),
                             class_from_label(rec["class"]),
                             float(rec.get("score", 1.0))))
    return out


# -- annotations ---------------------------------------------------------

def annotations_to_obj(image_name: str, img: RasterImage,
                       annotations: list[Annotation], layout=None) -> dict:
    objects = []
    for ann in annotations:
        rec = {"id": ann.object_id, "class": ann.cls.value,
               "bbox": box_to_list(ann.box)}
        if ann.text is not None:
            rec["text"] = ann.text
        if ann.word_boxes:
            rec["words"] = [box_to_list(b) for b in ann.word_boxes]
        objects.append(rec)
    obj = {"image": image_name, "width": img.width, "height": img.height,
           "objects": objects}
    if layout is not None:
        obj["layout"] = {
            "plot_box": box_to_list(layout.plot_box),
            "x_axis_y": q6(layout.x_axis_y),
            "y_axis_x": q6(layout.y_axis_x),
        }
        if layout.legend_box is not None:
            obj["layout"]["legend_box"] = box_to_list(layout.legend_box)
    return obj


def annotations_from_obj(obj) -> list[Annotation]:
    if not isinstance(obj, dict) or "objects" not in obj:
        raise SchemaError("annotation file needs an 'objects' list")
    out = []
    for rec in obj["objects"]:
        if "id" not in rec or "class" not in rec or "bbox" not in rec:
            raise SchemaError(f"annotation record missing keys: {rec!r}")
        words = tuple(box_from_list(w) for w in rec.get("words", []))
        out.append(Annotation(int(rec["id"]), class_from_label(rec["class"]),
                              box_from_list(rec["bbox"]), rec.get("text"),
                              words))
    return out


# -- tables --------------------------------------------------------------

def table_to_obj(table: PlotTable) -> dict:
    return {
        "rows": list(table.row_headers),
        "cols": list(table.col_headers),
        "values": [[None if v is None else q6(v) for v in row]
                   for row in table.values],
    }


def table_from_obj(obj) -> PlotTable:
    if not isinstance(obj, dict) or not {"rows", "cols", "values"} <= set(obj):
        raise SchemaError("table file needs rows/cols/values")
    values = [[None if v is None else float(v) for v in row]
              for row in obj["values"]]
    try:
        return PlotTable(list(obj["rows"]), list(obj["cols"]), values)
    except ValueError as exc:
        raise SchemaError(f"inconsistent table: {exc}") from exc


# -- corpus manifest -----------------------------------------------------

def manifest_to_obj(manifest) -> dict:
    return {"plots": [
        {"image": e.image, "annotations": e.annotations,
         "table": e.table, "seed": e.seed}
        for e in manifest.entries
    ]}


# -- proposals + training targets ----------------------------------------

def proposals_to_obj(image_name: str, img: RasterImage,
                     proposals: list[Proposal],
                     targets: list[ProposalTargets] | None = None) -> dict:
    obj = {
        "image": image_name, "width": img.width, "height": img.height,
        "proposals": [
            {"id": i, "bbox": box_to_list(p.box),
             "source_contour": p.source_contour}
            for i, p in enumerate(proposals)
        ],
    }
    if targets is not None:
        recs = []
        for i, t in enumerate(targets):
            rec = {"proposal": i, "class": t.cls.value,
                   "links": {d: t.links.get(d) for d in DIRECTIONS}}
            if t.regression_box is not None:
                rec["regression_box"] = box_to_list(t.regression_box)
            recs.append(rec)
        obj["targets"] = recs
    return obj
