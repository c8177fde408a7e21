"""Run manifests.

Every CLI run records the tool version, the command, a SHA-256 of the frozen
config dump, and the inputs (basename and hash) and outputs (path relative
to the output directory and hash) it touched. Nothing in it depends on the
wall clock, so reruns with the same seed are byte-identical. Start and finish
times are added only when ``SOURCE_DATE_EPOCH`` is set, and then come from it.
Wall-clock times go to the run log.
"""
from __future__ import absolute_import

import datetime
import hashlib
import os

import os.path as osp

from .iotools import sha256_file, write_json

MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1


def config_hash(cfg):
    return hashlib.sha256(cfg.dump().encode('utf-8')).hexdigest()


def run_timestamp():
    """``SOURCE_DATE_EPOCH`` as ISO-8601 UTC, or None when it is unset."""
    epoch = os.environ.get('SOURCE_DATE_EPOCH')
    if epoch is None:
        return None
    moment = datetime.datetime.fromtimestamp(int(epoch), tz=datetime.timezone.utc)
    return moment.strftime('%Y-%m-%dT%H:%M:%SZ')


class RunManifest(object):

    def __init__(self, command, cfg, out_dir, version):
        self.command = command
        self.cfg = cfg
        self.out_dir = out_dir
        self.version = version
        self.inputs = []
        self.outputs = []
        self.started = run_timestamp()

    def add_input(self, fpath):
        self.inputs.append({'name': osp.basename(fpath), 'sha256': sha256_file(fpath)})

    def add_output(self, fpath):
        self.outputs.append({'path': osp.relpath(fpath, self.out_dir).replace(os.sep, '/'),
                             'sha256': sha256_file(fpath)})
        return fpath

    def to_dict(self):
        record = {'manifest_version': MANIFEST_VERSION,
                  'tool': 'scatterquery', 'tool_version': self.version,
                  'command': self.command,
                  'seed': int(self.cfg.SEED),
                  'config_sha256': config_hash(self.cfg),
                  'inputs': sorted(self.inputs, key=lambda e: e['name']),
                  'outputs': sorted(self.outputs, key=lambda e: e['path'])}
        finished = run_timestamp()
        if self.started is not None:
            record['started'] = self.started
        if finished is not None:
            record['finished'] = finished
        return record

    def write(self):
        fpath = osp.join(self.out_dir, MANIFEST_NAME)
        write_json(self.to_dict(), fpath)
        return fpath
