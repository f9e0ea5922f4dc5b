#pragma once

#include "starpdd/baselines.hpp"
#include "starpdd/channel.hpp"
#include "starpdd/closed_form.hpp"
#include "starpdd/config.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/experiments.hpp"
#include "starpdd/numerics.hpp"
#include "starpdd/pdd.hpp"
#include "starpdd/rng.hpp"
#include "starpdd/star.hpp"
#include "starpdd/throughput.hpp"
#include "starpdd/wmmse.hpp"
