"""CPXR raster container.

Layout, all little-endian:

    magic "CPXR" | u16 version | u32 height | u32 width | u16 channels (8)
    8 float32 planes re(HH) im(HH) re(HV) im(HV) re(VH) im(VH) re(VV) im(VV)
    u32 metadata length | metadata JSON (sorted keys, UTF-8)
"""
from __future__ import absolute_import

import json

import numpy as np
import os.path as osp

from ..polsar.core import PolsarRaster, RasterMetadata
from .iotools import mkdir_if_missing

CPXR_MAGIC = b'CPXR'
CPXR_VERSION = 1
CPXR_CHANNELS = 8
HEADER = np.dtype([('magic', 'S4'), ('version', '<u2'), ('height', '<u4'), ('width', '<u4'),
                   ('channels', '<u2')])
PLANE_DTYPE = np.dtype('<f4')
LENGTH_DTYPE = np.dtype('<u4')


class CpxrError(ValueError):
    code = 'cpxr'


class CpxrMagicError(CpxrError):
    code = 'cpxr.magic'


class CpxrVersionError(CpxrError):
    code = 'cpxr.version'


class CpxrTruncatedError(CpxrError):
    code = 'cpxr.truncated'


class CpxrChannelError(CpxrError):
    code = 'cpxr.channels'


def encode_cpxr(raster):
    channels = raster.channels()
    header = np.array([(CPXR_MAGIC, CPXR_VERSION, raster.height, raster.width, CPXR_CHANNELS)], dtype=HEADER)
    meta = json.dumps(raster.metadata.to_dict(), sort_keys=True, separators=(',', ':')).encode('utf-8')
    return b''.join([header.tobytes(), channels.astype(PLANE_DTYPE).tobytes(),
                     np.array([len(meta)], dtype=LENGTH_DTYPE).tobytes(), meta])


def decode_cpxr(data, source='<bytes>'):
    if len(data) < HEADER.itemsize:
        raise CpxrTruncatedError("'{}' is truncated: {} bytes, header needs {}".format(source, len(data), HEADER.itemsize))
    header = np.frombuffer(data, dtype=HEADER, count=1)[0]
    if header['magic'] != CPXR_MAGIC:
        raise CpxrMagicError("'{}' has magic {!r}, expected {!r}".format(source, bytes(header['magic']), CPXR_MAGIC))
    if int(header['version']) != CPXR_VERSION:
        raise CpxrVersionError("'{}' has version {}, expected {}".format(source, int(header['version']), CPXR_VERSION))
    if int(header['channels']) != CPXR_CHANNELS:
        raise CpxrChannelError("'{}' has {} channels, expected {}".format(source, int(header['channels']), CPXR_CHANNELS))
    height, width = int(header['height']), int(header['width'])
    offset = HEADER.itemsize
    plane_bytes = CPXR_CHANNELS * height * width * PLANE_DTYPE.itemsize
    if len(data) < offset + plane_bytes + LENGTH_DTYPE.itemsize:
        raise CpxrTruncatedError("'{}' is truncated inside its planes".format(source))
    planes = np.frombuffer(data, dtype=PLANE_DTYPE, count=CPXR_CHANNELS * height * width, offset=offset)
    offset += plane_bytes
    meta_len = int(np.frombuffer(data, dtype=LENGTH_DTYPE, count=1, offset=offset)[0])
    offset += LENGTH_DTYPE.itemsize
    if len(data) < offset + meta_len:
        raise CpxrTruncatedError("'{}' is truncated inside its metadata".format(source))
    meta = json.loads(data[offset:offset + meta_len].decode('utf-8'))
    channels = planes.reshape(CPXR_CHANNELS, height, width).astype(np.float64)
    return PolsarRaster.from_channels(channels, RasterMetadata.from_dict(meta))


def write_cpxr(raster, fpath):
    mkdir_if_missing(osp.dirname(fpath))
    with open(fpath, 'wb') as f:
        f.write(encode_cpxr(raster))
    return fpath


def read_cpxr(fpath):
    with open(fpath, 'rb') as f:
        return decode_cpxr(f.read(), fpath)
