# Copyright 2026 The MultiStar Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Overlap-aware star-convex instance segmentation.

Thin wrapper over the compiled core; see ``help(multistar._core)``.
"""

from ._core import (
    ConstraintError,
    __version__,
    dice,
    edt,
    evaluate,
    ground_truth,
    multitask_loss,
    overlap_aware_iou,
    overlap_fraction,
    pixel_iou,
    rasterize,
    segment,
    star_distances,
    synthesize,
)

__all__ = [
    "ConstraintError",
    "dice",
    "edt",
    "evaluate",
    "ground_truth",
    "multitask_loss",
    "overlap_aware_iou",
    "overlap_fraction",
    "pixel_iou",
    "rasterize",
    "segment",
    "star_distances",
    "synthesize",
]
