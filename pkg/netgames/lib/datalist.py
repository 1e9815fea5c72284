"""
Holds a class for storing lists of records (episodes, trajectory steps),
and related methods.
"""
from collections.abc import MutableSequence
from io import StringIO
import csv
import numpy as np


class RecordList(MutableSequence):
    """ A list of flat records (dicts), that keeps track of the column set.

    The first record added fixes the column order. Later records must have
    the same columns, which keeps the CSV schema stable.
    Records are on the format {"episode": 0, "reward_0": 1.5, ...}
    """

    def __init__(self, *args, columns=None):
        self._columns = list(columns) if columns is not None else None
        self.list = list()
        self.extend(list(args))

    def check(self, v):
        # Fix or validate the schema with newly added data
        if not isinstance(v, dict):
            raise ValueError(f"A record must be a dict, got {type(v).__name__}")
        if self._columns is None:
            self._columns = list(v.keys())
        elif set(v.keys()) != set(self._columns):
            missing = set(self._columns) - set(v.keys())
            extra = set(v.keys()) - set(self._columns)
            raise ValueError(f"Record does not match columns. Missing: {sorted(missing)}, "
                             f"unexpected: {sorted(extra)}")
        return {k: v[k] for k in self._columns}

    @property
    def columns(self):
        return list(self._columns or [])

    def column(self, name):
        """ Return one column as a float array """
        return np.array([r[name] for r in self.list], dtype=float)

    @property
    def as_list_of_lists(self):
        return [[r[c] for c in self.columns] for r in self.list]

    @property
    def as_csv(self):
        """Render as csv string, header first. Floats are written with
        repr precision, so they parse back to the identical value.
        """
        csv_str = StringIO()
        writer = csv.writer(csv_str, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.as_list_of_lists:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
        return csv_str.getvalue()

    @classmethod
    def from_csv(cls, text):
        """ Parse a csv string written by as_csv. Numeric cells become floats. """
        reader = csv.reader(StringIO(text))
        header = next(reader)
        records = cls(columns=header)
        for row in reader:
            records.append({k: _parse_cell(x) for k, x in zip(header, row)})
        return records

    def __len__(self):
        return len(self.list)

    def __getitem__(self, i):
        return self.list[i]

    def __delitem__(self, i):
        del self.list[i]

    def __setitem__(self, i, v):
        v = self.check(v)
        self.list[i] = v

    def insert(self, i, v):
        v = self.check(v)
        self.list.insert(i, v)

    def __str__(self):
        return str(self.list)


def _parse_cell(x):
    try:
        return float(x)
    except ValueError:
        return x
