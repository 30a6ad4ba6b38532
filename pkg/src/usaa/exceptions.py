# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations


class USAAError(Exception):
    pass


class ParameterError(USAAError, ValueError):
    pass


class ConfigError(USAAError, ValueError):
    pass


class EncodingError(USAAError, ValueError):
    pass


class RandomCodesPresent(EncodingError):
    pass


class AugmentationSlotsExhausted(EncodingError):
    pass


class AUCUndefined(USAAError, ValueError):
    pass


class ShapeMismatch(USAAError, ValueError):
    pass


class NonFiniteTensor(USAAError, FloatingPointError):
    pass


class IDXFormatError(USAAError, ValueError):
    pass


class BadMagic(IDXFormatError):
    pass


class TruncatedPayload(IDXFormatError):
    pass


class UnsupportedDType(IDXFormatError):
    pass


class ManifestError(USAAError, ValueError):
    pass


class LabelRangeError(ManifestError):
    pass


class CheckpointError(USAAError):
    pass


class CheckpointVersionError(CheckpointError):
    pass
