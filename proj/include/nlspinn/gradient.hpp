#pragma once

// Exact parameter gradients of scalar functionals of the network field.
//
// A functional declares the point sets (and jet depth) it needs, then maps
// the network's outputs on those sets to a scalar plus the adjoint of every
// output channel. Jets run forward in (t, x); the adjoints are swept back
// through the same batched tapes to the parameters.

#include <span>
#include <vector>

#include "nlspinn/network.hpp"

namespace nlspinn {

struct ParamGradient {
    std::vector<double> values;
};

struct FieldQuery {
    std::vector<double> t;
    std::vector<double> x;
    JetMode mode = JetMode::Value;
};

class FieldFunctional {
public:
    virtual ~FieldFunctional() = default;
    virtual std::span<const FieldQuery> queries() const = 0;
    // fields[i] answers queries()[i]; adjoints arrive zero-initialised with the
    // same shapes and receive d(value)/d(field).
    virtual double evaluate(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const = 0;
};

struct ValueAndGradient {
    double value = 0.0;
    ParamGradient gradient;
};

// Value and gradient; throws NonFiniteGradient when any component is NaN/Inf.
ValueAndGradient value_and_gradient(const NetworkParams& params, const FieldFunctional& functional);

ParamGradient loss_gradient(const NetworkParams& params, const FieldFunctional& functional);

// Value only (no tapes kept).
double functional_value(const NetworkParams& params, const FieldFunctional& functional);

}  // namespace nlspinn
