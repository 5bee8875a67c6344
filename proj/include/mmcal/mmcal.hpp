// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "mmcal/calib_result.hpp"
#include "mmcal/config.hpp"
#include "mmcal/dataset.hpp"
#include "mmcal/error.hpp"
#include "mmcal/geometry.hpp"
#include "mmcal/image.hpp"
#include "mmcal/laser_edges.hpp"
#include "mmcal/mficp.hpp"
#include "mmcal/optimizer.hpp"
#include "mmcal/pipeline.hpp"
#include "mmcal/pointcloud.hpp"
#include "mmcal/reae_calib.hpp"
#include "mmcal/stereo_frontend.hpp"
#include "mmcal/synth.hpp"
#include "mmcal/thermal_edges.hpp"
