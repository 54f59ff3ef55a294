#pragma once

// Umbrella header. fetch.hpp is left out because it pulls in libcurl.

#include "corrlens/adapter.hpp"
#include "corrlens/corpus.hpp"
#include "corrlens/error.hpp"
#include "corrlens/eval.hpp"
#include "corrlens/ingest.hpp"
#include "corrlens/naming.hpp"
#include "corrlens/predict.hpp"
#include "corrlens/report.hpp"
#include "corrlens/stats.hpp"
