#pragma once

#include "tnbs/als.hpp"
#include "tnbs/bspline.hpp"
#include "tnbs/dense_tensor.hpp"
#include "tnbs/error.hpp"
#include "tnbs/io.hpp"
#include "tnbs/model.hpp"
#include "tnbs/synth.hpp"
#include "tnbs/tensor_train.hpp"
