"""Run report serialization: per-node CSV time series and an event log.

Floats are written with repr() so re-parsing reproduces the in-memory value
exactly; absent values (warm-up predictions) are empty fields.
"""

import csv
import json
import os

CSV_COLUMNS = ("step", "reading", "pred_ar", "pred_nn", "err_ar", "err_nn",
               "b_ar", "b_nn", "status")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_report(report, out_dir):
    """Write one CSV per node plus events.jsonl; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    by_node = {}
    for row in report.rows:
        by_node.setdefault(row["node_id"], []).append(row)

    paths = []
    for node_id in sorted(by_node):
        path = os.path.join(out_dir, f"node_{node_id:03d}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in by_node[node_id]:
                writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
        paths.append(path)

    events_path = os.path.join(out_dir, "events.jsonl")
    with open(events_path, "w") as fh:
        for event in report.events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
    paths.append(events_path)
    return paths


def read_node_csv(path):
    """Parse a node CSV back into row dicts with exact float round-trip."""
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            row = {}
            for col in ("step", "b_ar", "b_nn"):
                row[col] = int(record[col])
            for col in ("reading", "pred_ar", "pred_nn", "err_ar", "err_nn"):
                row[col] = float(record[col]) if record[col] else None
            row["status"] = record["status"]
            row["node_id"] = None
            rows.append(row)
    return rows


def summary_text(report):
    s = report.summary
    lines = [f"scenario: {report.scenario_name}",
             f"steps simulated: {s['steps']}"]
    if s["nodes_destroyed"]:
        for node_id, step in s["nodes_destroyed"]:
            lines.append(f"node {node_id} destroyed at step {step}")
    else:
        lines.append("nodes destroyed: none")
    lines.append(f"attacked nodes: {s['attacked_nodes'] or 'none'}")
    lines.append(f"false expulsions: {s['false_expulsions'] or 'none'}")
    for node_id, step in sorted(s["detection_step"].items()):
        lines.append(f"node {node_id} detected at step {step}")
    return "\n".join(lines)
