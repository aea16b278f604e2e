#pragma once

#include "freqaug/augment.hpp"
#include "freqaug/classifier.hpp"
#include "freqaug/corruption.hpp"
#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/oodval.hpp"
#include "freqaug/probe.hpp"
#include "freqaug/rng.hpp"
#include "freqaug/spectral.hpp"
#include "freqaug/tensorio.hpp"
#include "freqaug/version.hpp"
