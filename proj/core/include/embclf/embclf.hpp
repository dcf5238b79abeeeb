#pragma once

#include "embclf/checkpoint.hpp"
#include "embclf/error.hpp"
#include "embclf/heads.hpp"
#include "embclf/inference.hpp"
#include "embclf/metrics.hpp"
#include "embclf/optim.hpp"
#include "embclf/parallel.hpp"
#include "embclf/random.hpp"
#include "embclf/store.hpp"
#include "embclf/synth.hpp"
#include "embclf/trainer.hpp"
#include "embclf/vecsearch.hpp"
