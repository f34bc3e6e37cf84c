import csv
import io
from dataclasses import dataclass

import numpy as np

from pathfinder.errors import DataError, DimensionError

HEADER = ['u1', 'v1', 'u2', 'v2']


@dataclass(frozen=True, eq=False)
class Correspondences:
    src: np.ndarray
    dst: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.float64).reshape(-1, 2)
        dst = np.asarray(self.dst, dtype=np.float64).reshape(-1, 2)
        if src.shape != dst.shape:
            raise DimensionError('correspondence sides differ: %s vs %s' % (src.shape, dst.shape))
        object.__setattr__(self, 'src', src)
        object.__setattr__(self, 'dst', dst)

    def __len__(self):
        return self.src.shape[0]


def format_matches(matches):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(HEADER)
    for (u1, v1), (u2, v2) in zip(matches.src, matches.dst):
        writer.writerow([repr(float(u1)), repr(float(v1)), repr(float(u2)), repr(float(v2))])
    return buffer.getvalue()


def parse_matches(text, source='<matches>'):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError('empty correspondence file', source)
    if [h.strip() for h in header] != HEADER:
        raise DataError('correspondence header must be u1,v1,u2,v2', source)
    rows = []
    for line_num, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise DataError('non-numeric value on line %d' % line_num, source)
        if len(rows[-1]) != 4:
            raise DataError('expected 4 columns on line %d' % line_num, source)
    data = np.asarray(rows, dtype=np.float64).reshape(-1, 4)
    return Correspondences(src=data[:, :2], dst=data[:, 2:])


def read_matches(path):
    try:
        with open(path, 'r') as f:
            return parse_matches(f.read(), source=path)
    except OSError as e:
        raise DataError('cannot read correspondences (%s)' % e.strerror, path)
