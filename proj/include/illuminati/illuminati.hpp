#ifndef ILLUMINATI_ILLUMINATI_HPP
#define ILLUMINATI_ILLUMINATI_HPP

#include "dataset.hpp"
#include "dot.hpp"
#include "errors.hpp"
#include "explainer.hpp"
#include "explanation_io.hpp"
#include "graph.hpp"
#include "hard_concrete.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "oracle.hpp"
#include "trainer.hpp"

#endif // ILLUMINATI_ILLUMINATI_HPP
