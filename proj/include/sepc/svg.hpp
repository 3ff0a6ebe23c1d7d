#pragma once

#include <string>

#include "sepc/dataset.hpp"
#include "sepc/partition.hpp"

namespace sepc {

/// Static 2-D plot: data points colored by label, one <ellipse> element
/// per model region. Throws PlotDimension unless the model is 2-D.
void write_partition_svg(const PartitionModel& model, const LabeledDataset& d,
                         const std::string& path);

}  // namespace sepc
