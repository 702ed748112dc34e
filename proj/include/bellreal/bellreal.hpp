#pragma once

#include "bellreal/core.hpp"
#include "bellreal/inequalities.hpp"
#include "bellreal/lhv.hpp"
#include "bellreal/optimizer.hpp"
#include "bellreal/quantum.hpp"
#include "bellreal/random.hpp"
#include "bellreal/theorem.hpp"
