#include "nlspinn/gradient.hpp"

#include <cmath>
#include <string>

#include "nlspinn/errors.hpp"

namespace nlspinn {

ValueAndGradient value_and_gradient(const NetworkParams& params, const FieldFunctional& functional) {
    const auto queries = functional.queries();
    std::vector<BatchEvaluator> tapes;
    std::vector<FieldBatch> fields, adjoints;
    tapes.reserve(queries.size());
    for (const FieldQuery& q : queries) {
        tapes.emplace_back(params, q.t, q.x, q.mode);
        fields.push_back(tapes.back().field());
        adjoints.emplace_back(q.mode, q.t.size());
    }
    ValueAndGradient out;
    out.value = functional.evaluate(fields, adjoints);
    out.gradient.values.assign(params.size(), 0.0);
    for (std::size_t i = 0; i < tapes.size(); ++i) tapes[i].backward(adjoints[i], out.gradient.values);
    for (std::size_t i = 0; i < out.gradient.values.size(); ++i) {
        if (!std::isfinite(out.gradient.values[i]))
            throw NonFiniteGradient("gradient component " + std::to_string(i) + " is not finite");
    }
    return out;
}

ParamGradient loss_gradient(const NetworkParams& params, const FieldFunctional& functional) {
    return value_and_gradient(params, functional).gradient;
}

double functional_value(const NetworkParams& params, const FieldFunctional& functional) {
    const auto queries = functional.queries();
    std::vector<FieldBatch> fields, adjoints;
    for (const FieldQuery& q : queries) {
        fields.push_back(evaluate(params, q.t, q.x, q.mode));
        adjoints.emplace_back(q.mode, q.t.size());
    }
    return functional.evaluate(fields, adjoints);
}

}  // namespace nlspinn
