"""JSON system-spec files.

Schema::

    {
      "n": 2,
      "P1": [[0, 1], [1, 0]],
      "P0": [[0, 0], [0, 0]],                      (optional, default 0)
      "H": {"profile": "constant", "matrix": [[1, 0], [0, 1]]}
           | {"profile": "sampled", "samples": [M_0, ..., M_{m-1}]},
      "WB": [[...2n entries...], ...],             (n rows)
      "WC": [[...2n entries...], ...]              (optional, k <= n rows)
    }

Matrix entries are real numbers or ``[re, im]`` pairs. Sampled H is taken
on the uniform grid ``zeta_j = j / (m - 1)``.
"""

import json

import numpy as np

from .exceptions import PHBCError
from .systems import MatrixField, PHSystem

__all__ = ['SpecParseError', 'load_spec', 'parse_spec', 'dump_spec', 'format_spec', 'system_to_dict']


class SpecParseError(PHBCError, ValueError):
    """Malformed spec file; `field` names the offending entry."""

    def __init__(self, message, field=None, line=None):
        where = ''
        if field is not None:
            where += f'field {field!r}'
        if line is not None:
            where += (', ' if where else '') + f'line {line}'
        super().__init__(f'{where}: {message}' if where else message)
        self.field = field
        self.line = line


def _scalar(v, field):
    if isinstance(v, bool):
        raise SpecParseError('booleans are not numbers', field)
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        return complex(v[0], v[1])
    raise SpecParseError(f'expected a number or [re, im], got {v!r}', field)


def _matrix(v, field, rows=None, cols=None):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise SpecParseError('expected a non-empty list of rows', field)
    out = [[_scalar(x, f'{field}[{i}][{j}]') for j, x in enumerate(r)] for i, r in enumerate(v)]
    widths = {len(r) for r in out}
    if len(widths) != 1:
        raise SpecParseError('rows have different lengths', field)
    a = np.array(out, dtype=complex)
    if rows is not None and a.shape[0] != rows:
        raise SpecParseError(f'expected {rows} rows, got {a.shape[0]}', field)
    if cols is not None and a.shape[1] != cols:
        raise SpecParseError(f'expected {cols} columns, got {a.shape[1]}', field)
    return a


def parse_spec(doc):
    """Build a :class:`PHSystem` from a decoded spec document."""
    if not isinstance(doc, dict):
        raise SpecParseError('top level must be an object')
    for key in ('n', 'P1', 'H', 'WB'):
        if key not in doc:
            raise SpecParseError('missing required entry', key)
    unknown = set(doc) - {'n', 'P1', 'P0', 'H', 'WB', 'WC', 'name', 'description'}
    if unknown:
        raise SpecParseError(f'unknown entries {sorted(unknown)}')
    n = doc['n']
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SpecParseError('must be a positive integer', 'n')
    P1 = _matrix(doc['P1'], 'P1', n, n)
    P0 = _matrix(doc['P0'], 'P0', n, n) if doc.get('P0') is not None else None
    h = doc['H']
    if not isinstance(h, dict) or 'profile' not in h:
        raise SpecParseError('expected an object with a "profile" entry', 'H')
    if h['profile'] == 'constant':
        if 'matrix' not in h:
            raise SpecParseError('missing required entry', 'H.matrix')
        H = MatrixField.constant(_matrix(h['matrix'], 'H.matrix', n, n))
    elif h['profile'] == 'sampled':
        s = h.get('samples')
        if not isinstance(s, list) or len(s) < 2:
            raise SpecParseError('need at least two sample matrices', 'H.samples')
        H = MatrixField(np.array([_matrix(m, f'H.samples[{j}]', n, n) for j, m in enumerate(s)]))
    else:
        raise SpecParseError(f'unknown profile {h["profile"]!r} (constant or sampled)', 'H.profile')
    WB = _matrix(doc['WB'], 'WB', n, 2 * n)
    WC = None
    if doc.get('WC') not in (None, []):
        WC = _matrix(doc['WC'], 'WC', None, 2 * n)
        if WC.shape[0] > n:
            raise SpecParseError(f'at most {n} rows allowed', 'WC')
    return PHSystem(P1=P1, P0=P0, H=H, WB=WB, WC=WC)


def load_spec(path):
    """Read and parse a spec file; JSON syntax errors report the line."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecParseError(f'cannot read {path}: {exc.strerror}') from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, line=exc.lineno) from exc
    return parse_spec(doc)


def _enc(a):
    a = np.asarray(a, dtype=complex)
    if not np.any(a.imag):
        return a.real.tolist()
    return np.stack([a.real, a.imag], axis=-1).tolist()


def system_to_dict(sys):
    doc = {'n': sys.n, 'P1': _enc(sys.P1)}
    if np.any(sys.P0):
        doc['P0'] = _enc(sys.P0)
    if sys.H.is_constant:
        doc['H'] = {'profile': 'constant', 'matrix': _enc(sys.H.samples[0])}
    else:
        doc['H'] = {'profile': 'sampled', 'samples': [_enc(m) for m in sys.H.samples]}
    doc['WB'] = _enc(sys.WB)
    if sys.k:
        doc['WC'] = _enc(sys.WC)
    return doc


def format_spec(doc):
    """JSON text with one matrix row per line."""
    def mat(a, ind):
        return '[\n' + ',\n'.join(ind + '  ' + json.dumps(r) for r in a) + '\n' + ind + ']'

    parts = []
    for key, val in doc.items():
        if key == 'H':
            inner = [f'    "profile": "{val["profile"]}"']
            if 'matrix' in val:
                inner.append('    "matrix": ' + mat(val['matrix'], '    '))
            else:
                inner.append('    "samples": [\n' + ',\n'.join(
                    '      ' + mat(m, '      ') for m in val['samples']) + '\n    ]')
            parts.append('  "H": {\n' + ',\n'.join(inner) + '\n  }')
        elif isinstance(val, list):
            parts.append(f'  "{key}": ' + mat(val, '  '))
        else:
            parts.append(f'  "{key}": {json.dumps(val)}')
    return '{\n' + ',\n'.join(parts) + '\n}\n'


def dump_spec(sys, path):
    with open(path, 'w') as fh:
        fh.write(format_spec(system_to_dict(sys)))
