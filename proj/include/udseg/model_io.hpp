#ifndef UDSEG_MODEL_IO_HPP
#define UDSEG_MODEL_IO_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "udseg/pipeline.hpp"

namespace udseg {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model directory layout:
//   meta       key=value lines (format version, shapes, config echo)
//   vocab.tsv  order<TAB>surface<TAB>index (orders 1/2/3; 't' for the
//              transducer alphabet)
//   params.bin for each parameter in declared order: u64le name length,
//              name bytes, u64le rank, u64le dims, f32le data
//   mwt.tsv    surface<TAB>components joined by the 0x1F unit separator
void save_segmenter(const std::string& dir, Segmenter& seg,
                    const std::vector<std::pair<std::string, std::string>>& extra_meta = {});

Segmenter load_segmenter(const std::string& dir);

// Backslash escaping for tab/newline/CR in TSV payload fields.
std::string escape_tsv(const std::string& s);
std::string unescape_tsv(const std::string& s);

}  // namespace udseg

#endif
