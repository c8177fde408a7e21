"""Named-array blobs, checkpoints and plane stacks.

A blob is a fixed header (magic, u16 version, u32 index length), a JSON
index (sorted keys) and the raw little-endian arrays in index order. It has
no timestamps or padding, so equal inputs give equal bytes.
"""
from __future__ import print_function, absolute_import

import json
import logging
from collections import OrderedDict

import numpy as np
import os.path as osp

from .iotools import mkdir_if_missing, read_json, write_json

logger = logging.getLogger("scatterquery.io")

BLOB_VERSION = 1
CHECKPOINT_MAGIC = b'SQCK'
QUERIES_MAGIC = b'SQQY'
_HEADER = np.dtype([('magic', 'S4'), ('version', '<u2'), ('index_len', '<u4')])


class BlobError(ValueError):
    code = 'blob'


def _little_endian(array):
    array = np.ascontiguousarray(array)
    return array.astype(array.dtype.newbyteorder('<'), copy=False)


def write_blob(fpath, magic, arrays, meta=None):
    mkdir_if_missing(osp.dirname(fpath))
    index, payload, offset = [], [], 0
    for name, array in arrays.items():
        array = _little_endian(np.asarray(array))
        index.append({'name': name, 'dtype': array.dtype.str, 'shape': list(array.shape),
                      'offset': offset, 'nbytes': int(array.nbytes)})
        payload.append(array.tobytes())
        offset += array.nbytes
    body = json.dumps({'arrays': index, 'meta': meta or {}}, sort_keys=True,
                      separators=(',', ':')).encode('utf-8')
    header = np.array([(magic, BLOB_VERSION, len(body))], dtype=_HEADER)
    with open(fpath, 'wb') as f:
        f.write(header.tobytes())
        f.write(body)
        for chunk in payload:
            f.write(chunk)


def read_blob(fpath, magic):
    """Returns (OrderedDict name -> array, meta)."""
    with open(fpath, 'rb') as f:
        data = f.read()
    if len(data) < _HEADER.itemsize:
        raise BlobError("'{}' is truncated: {} bytes".format(fpath, len(data)))
    header = np.frombuffer(data, dtype=_HEADER, count=1)[0]
    if header['magic'] != magic:
        raise BlobError("'{}' has magic {!r}, expected {!r}".format(fpath, header['magic'], magic))
    if int(header['version']) != BLOB_VERSION:
        raise BlobError("'{}' has blob version {}, expected {}".format(fpath, int(header['version']), BLOB_VERSION))
    start = _HEADER.itemsize
    end = start + int(header['index_len'])
    if len(data) < end:
        raise BlobError("'{}' is truncated inside its index".format(fpath))
    index = json.loads(data[start:end].decode('utf-8'))
    arrays = OrderedDict()
    for entry in index['arrays']:
        lo = end + entry['offset']
        hi = lo + entry['nbytes']
        if len(data) < hi:
            raise BlobError("'{}' is truncated inside array '{}'".format(fpath, entry['name']))
        array = np.frombuffer(data[lo:hi], dtype=np.dtype(entry['dtype'])).reshape(entry['shape'])
        arrays[entry['name']] = array.copy()
    return arrays, index['meta']


def manifest_path(fpath):
    return osp.splitext(fpath)[0] + '.json'


def save_checkpoint(state, fpath, meta=None):
    """Parameters as a blob plus a JSON manifest of shapes and run metadata next to it."""
    write_blob(fpath, CHECKPOINT_MAGIC, state, meta)
    manifest = {'format_version': BLOB_VERSION,
                'shapes': {name: list(np.shape(value)) for name, value in state.items()},
                'meta': meta or {}}
    write_json(manifest, manifest_path(fpath))
    return fpath


def load_checkpoint(fpath):
    """Returns (state, meta)."""
    if osp.isfile(fpath):
        state, meta = read_blob(fpath, CHECKPOINT_MAGIC)
        logger.info("=> Loaded checkpoint '{}'".format(fpath))
        return state, meta
    else:
        raise ValueError("=> No checkpoint found at '{}'".format(fpath))


def save_planes(planes, fpath, sidecar):
    """``.npy`` planes plus their JSON sidecar."""
    mkdir_if_missing(osp.dirname(fpath))
    np.save(fpath, np.ascontiguousarray(planes), allow_pickle=False)
    write_json(sidecar, manifest_path(fpath))
    return fpath


def load_planes(fpath):
    planes = np.load(fpath, allow_pickle=False)
    sidecar_path = manifest_path(fpath)
    sidecar = read_json(sidecar_path) if osp.isfile(sidecar_path) else {}
    return planes, sidecar
