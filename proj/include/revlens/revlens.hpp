#pragma once

#include "revlens/aspects.hpp"
#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"
#include "revlens/pipeline.hpp"
#include "revlens/powerfit.hpp"
#include "revlens/preprocess.hpp"
#include "revlens/resources.hpp"
#include "revlens/sentiment.hpp"
#include "revlens/simulate.hpp"
#include "revlens/temporal.hpp"
