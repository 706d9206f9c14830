#pragma once

#include "adsurge/activity.hpp"
#include "adsurge/classify.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/events.hpp"
#include "adsurge/fisher.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/io.hpp"
#include "adsurge/linkage.hpp"
#include "adsurge/parallel.hpp"
#include "adsurge/phonex.hpp"
#include "adsurge/pipeline.hpp"
#include "adsurge/scan.hpp"
#include "adsurge/synth.hpp"
