#pragma once

#include "blobtrack/container.hpp"
#include "blobtrack/detect.hpp"
#include "blobtrack/distribution.hpp"
#include "blobtrack/error.hpp"
#include "blobtrack/geometry.hpp"
#include "blobtrack/label.hpp"
#include "blobtrack/mesh.hpp"
#include "blobtrack/params.hpp"
#include "blobtrack/pipeline.hpp"
#include "blobtrack/results.hpp"
#include "blobtrack/synthetic.hpp"
#include "blobtrack/track.hpp"
#include "blobtrack/version.hpp"
