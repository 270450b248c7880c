#pragma once

#include "infa/common.hpp"
#include "infa/metricspace.hpp"
#include "infa/dataset.hpp"
#include "infa/models.hpp"
#include "infa/statistics.hpp"
#include "infa/synthesis.hpp"
#include "infa/attacks.hpp"
#include "infa/mrmr.hpp"
#include "infa/kmeans.hpp"
#include "infa/experiments.hpp"
#include "infa/separation.hpp"
#include "infa/io.hpp"
#include "infa/report.hpp"
#include "infa/run.hpp"
