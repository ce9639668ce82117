import io
import json
import os
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
from pytpc.common.dataset import ViewMatrix
from pytpc.loader.base import DatasetLoader, ShapeMismatch, assemble


class ParseError(ValueError):
    """ A matrix or label file could not be parsed.

    Attributes:
        path (str): offending file.
        line (int): 1-based line number.
        column (int): 1-based column (field) number, None for label files.
    """

    def __init__(self, path, line, column, message):
        self.path = path
        self.line = line
        self.column = column
        where = "{}:{}".format(path, line) if column is None else "{}:{}:{}".format(path, line, column)
        super(ParseError, self).__init__("{}: {}".format(where, message))


@dataclass
class DatasetManifest:
    """ Description of a dataset stored as delimiter-separated text files.

    Manifest JSON: {"name": ..., "views": [paths], "labels": path, "delimiter": ","};
    relative paths are resolved against the manifest's directory.

    Attributes:
        name (str): dataset name.
        views (list of str): one matrix file per view, one sample per line.
        labels (str): optional file with one integer label per line.
        delimiter (str): field separator of the matrix files, None for whitespace.
        n (int): expected number of samples, checked when set.
        V (int): expected number of views, checked when set.
    """
    name: str
    views: List[str] = field(default_factory=list)
    labels: Optional[str] = None
    delimiter: Optional[str] = ","
    n: Optional[int] = None
    V: Optional[int] = None

    @classmethod
    def from_json(cls, path):
        with io.open(path, "r", encoding="utf8") as f:
            data = json.load(f)
        root = os.path.dirname(os.path.abspath(path))

        def resolve(p):
            return p if os.path.isabs(p) else os.path.join(root, p)

        if "views" not in data or not data["views"]:
            raise ValueError("manifest {} lists no views".format(path))
        return cls(
            name=data.get("name", os.path.splitext(os.path.basename(path))[0]),
            views=[resolve(p) for p in data["views"]],
            labels=resolve(data["labels"]) if data.get("labels") else None,
            delimiter=data.get("delimiter", ","),
            n=data.get("n"),
            V=data.get("V"),
        )

    def to_json(self, path):
        """ Write the manifest with paths relative to its directory. """
        root = os.path.dirname(os.path.abspath(path))
        data = {
            "name": self.name,
            "views": [os.path.relpath(p, root) for p in self.views],
            "delimiter": self.delimiter,
        }
        if self.labels:
            data["labels"] = os.path.relpath(self.labels, root)
        with io.open(path, "w", encoding="utf8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
            f.write("\n")

    def validate(self):
        missing = [p for p in self.views + ([self.labels] if self.labels else [])
                   if not os.path.isfile(p)]
        if missing:
            raise FileNotFoundError("manifest {} references missing files: {}".format(
                self.name, ", ".join(missing)))
        if self.V is not None and self.V != len(self.views):
            raise ShapeMismatch("manifest {} expects {} views but lists {}".format(
                self.name, self.V, len(self.views)))


def read_matrix(path, delimiter=","):
    """ Parse a delimiter-separated numeric matrix, one row per non-empty line. """
    rows = []
    with io.open(path, "r", encoding="utf8") as f:
        for iline, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(delimiter) if delimiter else line.split()
            row = []
            for icol, value in enumerate(fields, start=1):
                try:
                    row.append(float(value))
                except ValueError:
                    raise ParseError(path, iline, icol, "not a number: {!r}".format(value))
            if rows and len(row) != len(rows[0]):
                raise ParseError(path, iline, len(row), "expected {} fields, found {}".format(
                    len(rows[0]), len(row)))
            rows.append(row)
    if not rows:
        raise ParseError(path, 1, 1, "no data")
    return np.array(rows)


def read_labels(path):
    """ Parse one integer label per non-empty line. """
    labels = []
    with io.open(path, "r", encoding="utf8") as f:
        for iline, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                value = int(line)
            except ValueError:
                raise ParseError(path, iline, None, "not an integer: {!r}".format(line))
            if value < 0:
                raise ParseError(path, iline, None, "negative label {}".format(value))
            labels.append(value)
    return np.array(labels, dtype=int)


def load_dataset(manifest: DatasetManifest):
    """ Read all views and labels of a manifest (no standardization here). """
    manifest.validate()
    views = [ViewMatrix(read_matrix(p, manifest.delimiter), name=os.path.basename(p))
             for p in manifest.views]
    labels = read_labels(manifest.labels) if manifest.labels else None
    dataset = assemble(views, labels, manifest.name)
    if manifest.n is not None and manifest.n != dataset.n:
        raise ShapeMismatch("manifest {} expects {} samples, files contain {}".format(
            manifest.name, manifest.n, dataset.n))
    return dataset


class TextLoader(DatasetLoader):
    """ Loader for datasets described by a DatasetManifest.

    Extra attributes:
        manifest (DatasetManifest): files of the dataset.
    """

    def __init__(self, manifest):
        if not isinstance(manifest, DatasetManifest):
            manifest = DatasetManifest.from_json(manifest)
        super(TextLoader, self).__init__(manifest.name)
        self.manifest = manifest

    def load(self):
        return load_dataset(self.manifest)
