import hashlib
import json
import os

import os.path as osp


def mkdir_if_missing(directory):
    """No-op for '' so callers can pass osp.dirname of a bare file name."""
    if directory:
        os.makedirs(directory, exist_ok=True)


def read_json(fpath):
    with open(fpath, 'r', encoding='utf-8') as f:
        return json.load(f)


def write_json(obj, fpath):
    """Sorted keys and a trailing newline, so equal objects give equal bytes."""
    mkdir_if_missing(osp.dirname(fpath))
    with open(fpath, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=4, separators=(',', ': '), sort_keys=True)
        f.write('\n')


def sha256_file(fpath, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(fpath, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()
