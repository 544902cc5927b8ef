"""Dataset files: a dense ARFF subset, CSV, and the bundled collection."""

import csv
import io
import re
import shlex
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Dataset

MISSING = "?"


class ArffError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _split_row(text):
    reader = csv.reader([text], skipinitialspace=True, quotechar="'")
    row = next(reader)
    return [v.strip().strip('"') for v in row]


def _parse_attribute(rest, lineno):
    rest = rest.strip()
    m = re.match(r"""^('(?:[^']|\\')*'|"[^"]*"|\S+)\s+(.*)$""", rest)
    if not m:
        raise ArffError("malformed @attribute declaration", lineno)
    name = m.group(1).strip("'\"")
    kind = m.group(2).strip()
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise ArffError("unterminated nominal value list", lineno)
        values = [v for v in _split_row(kind[1:-1]) if v != ""]
        return name, values
    kind = kind.lower()
    if kind in ("numeric", "real", "integer"):
        return name, None
    raise ArffError(f"unsupported attribute type {kind!r}", lineno)


def parse_arff(text, class_attribute=None):
    """Parse ARFF text; returns ``(dataset, dropped_rows)``.

    Numeric and nominal attributes are supported; nominal features are
    one-hot expanded.  The class is the last attribute unless
    ``class_attribute`` names another one.  Rows with a missing value are
    dropped and counted.
    """
    relation = ""
    attrs = []
    data_lines = []
    in_data = False
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            data_lines.append((lineno, line))
            continue
        low = line.lower()
        if low.startswith("@relation"):
            relation = line[len("@relation"):].strip().strip("'\"")
        elif low.startswith("@attribute"):
            attrs.append(_parse_attribute(line[len("@attribute"):], lineno))
        elif low.startswith("@data"):
            in_data = True
        elif low.startswith("@inputs") or low.startswith("@outputs") or low.startswith("@input") \
                or low.startswith("@output"):
            continue
        else:
            raise ArffError(f"unexpected header line {line!r}", lineno)
    if not in_data:
        raise ArffError("missing @data section")
    if len(attrs) < 2:
        raise ArffError("need at least one feature and a class attribute")

    names = [a[0] for a in attrs]
    if class_attribute is None:
        target = len(attrs) - 1
    else:
        if class_attribute not in names:
            raise ArffError(f"no attribute named {class_attribute!r}")
        target = names.index(class_attribute)

    rows, dropped = [], 0
    for lineno, line in data_lines:
        if line.startswith("{"):
            raise ArffError("sparse ARFF rows are not supported", lineno)
        values = _split_row(line)
        if len(values) != len(attrs):
            raise ArffError(f"expected {len(attrs)} values, found {len(values)}", lineno)
        if any(v == MISSING for v in values):
            dropped += 1
            continue
        rows.append((lineno, values))
    if not rows:
        raise ArffError("no complete data rows")

    columns, feat_names = [], []
    for j, (name, nominal) in enumerate(attrs):
        if j == target:
            continue
        if nominal is None:
            col = np.empty(len(rows))
            for i, (lineno, values) in enumerate(rows):
                try:
                    col[i] = float(values[j])
                except ValueError:
                    raise ArffError(f"non-numeric value {values[j]!r} for {name}", lineno) from None
            columns.append(col[:, None])
            feat_names.append(name)
        else:
            index = {v: k for k, v in enumerate(nominal)}
            onehot = np.zeros((len(rows), len(nominal)))
            for i, (lineno, values) in enumerate(rows):
                if values[j] not in index:
                    raise ArffError(f"undeclared nominal value {values[j]!r} for {name}", lineno)
                onehot[i, index[values[j]]] = 1.0
            columns.append(onehot)
            feat_names.extend(f"{name}={v}" for v in nominal)

    cname, declared = attrs[target]
    raw_labels = [values[target] for _, values in rows]
    if declared is not None:
        for (lineno, _), v in zip(rows, raw_labels):
            if v not in declared:
                raise ArffError(f"undeclared class value {v!r}", lineno)
        order = [v for v in declared if v in set(raw_labels)]
    else:
        order = sorted(set(raw_labels), key=_label_key)
    labels, class_names = _densify(raw_labels, order)
    return Dataset(np.hstack(columns), labels, len(class_names), tuple(feat_names), relation,
                   class_names), dropped


def _label_key(v):
    try:
        return (0, float(v), v)
    except ValueError:
        return (1, 0.0, v)


def _densify(raw, order):
    if len(order) < 2:
        raise ValueError("the class attribute must take at least two values")
    index = {v: i for i, v in enumerate(order)}
    return np.array([index[v] for v in raw], dtype=np.int64), tuple(order)


def parse_csv(text, relation=""):
    """CSV with a header row; the last column is the class.  Returns (dataset, dropped)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValueError("empty CSV file") from None
    rows, dropped = [], 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not v.strip() for v in row):
            continue
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, found {len(row)}")
        row = [v.strip() for v in row]
        if any(v in (MISSING, "") for v in row):
            dropped += 1
            continue
        try:
            feats = [float(v) for v in row[:-1]]
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric feature value") from None
        rows.append((feats, row[-1]))
    if not rows:
        raise ValueError("no complete data rows")
    raw_labels = [r[1] for r in rows]
    labels, names = _densify(raw_labels, sorted(set(raw_labels), key=_label_key))
    x = np.array([r[0] for r in rows], dtype=float)
    return Dataset(x, labels, len(names), tuple(header[:-1]), relation, names), dropped


def _warn_dropped(dropped, source):
    if dropped:
        warnings.warn(f"{source}: dropped {dropped} rows with missing values", stacklevel=3)


def load_dataset(path, fmt=None, class_attribute=None):
    """Load an ARFF or CSV file (format from the extension unless given)."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    text = path.read_text()
    if fmt == "arff":
        dataset, dropped = parse_arff(text, class_attribute)
    elif fmt == "csv":
        dataset, dropped = parse_csv(text, relation=path.stem)
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")
    _warn_dropped(dropped, path.name)
    return dataset


def write_csv(dataset, path):
    """Write features (shortest round-trip float repr) and class names."""
    names = dataset.class_names or tuple(str(i) for i in range(dataset.class_count))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*dataset.feature_names, "class"])
        for row, label in zip(dataset.features, dataset.labels):
            w.writerow([*(repr(float(v)) for v in row), names[label]])


def format_arff(dataset, relation=None):
    names = dataset.class_names or tuple(str(i) for i in range(dataset.class_count))
    out = [f"@relation {shlex.quote(relation or dataset.relation_name or 'data')}", ""]
    for name in dataset.feature_names:
        out.append(f"@attribute {shlex.quote(name)} numeric")
    out.append("@attribute class {" + ",".join(names) + "}")
    out += ["", "@data"]
    for row, label in zip(dataset.features, dataset.labels):
        out.append(",".join([*(repr(float(v)) for v in row), names[label]]))
    return "\n".join(out) + "\n"


# -- bundled collection ---------------------------------------------------------

def bundled_names():
    files = resources.files("rrcscm.data").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".arff"))


def bundled_path(name):
    res = resources.files("rrcscm.data") / f"{name}.arff"
    if not res.is_file():
        raise KeyError(f"no bundled dataset {name!r}; available: {', '.join(bundled_names())}")
    return Path(str(res))


def load_bundled(name):
    dataset, dropped = parse_arff(bundled_path(name).read_text())
    _warn_dropped(dropped, name)
    return dataset


def resolve(spec):
    """A dataset given by file path or bundled name."""
    path = Path(spec)
    if path.suffix.lower() in (".arff", ".csv") and path.exists():
        return load_dataset(path)
    return load_bundled(str(spec))
