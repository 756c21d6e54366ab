#include "lccf/datasets.hpp"

#include "lccf/error.hpp"
#include "lccf/rng.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace lccf {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    for (auto& f : out) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' '))
            f.pop_back();
        while (!f.empty() && f.front() == ' ')
            f.erase(f.begin());
    }
    return out;
}

int parse_int(const std::string& text, const std::string& where)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw DataError(where + ": expected an integer, got '" + text + "'");
    return v;
}

bool inside(GridPoint p, int width, int height)
{
    return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
}

std::uint32_t read_be32(const unsigned char* p)
{
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

// Smooth random texture in roughly [0.5 - amp, 0.5 + amp].
ImagePlane smooth_texture(int width, int height, Rng& rng, int waves, double amp, double min_period,
                          double max_period)
{
    struct Wave {
        double kx, ky, phase, weight;
    };
    std::vector<Wave> ws;
    double total = 0.0;
    for (int i = 0; i < waves; ++i) {
        const double angle = rng.uniform(0.0, std::numbers::pi);
        const double period = rng.uniform(min_period, max_period);
        const double k = 2.0 * std::numbers::pi / period;
        const double weight = rng.uniform(0.5, 1.0);
        ws.push_back({k * std::cos(angle), k * std::sin(angle), rng.uniform(0.0, 2.0 * std::numbers::pi), weight});
        total += weight;
    }
    ImagePlane out(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            double v = 0.0;
            for (const auto& w : ws)
                v += w.weight * std::sin(w.kx * c + w.ky * r + w.phase);
            out.at(r, c) = 0.5 + amp * v / total;
        }
    return out;
}

// Blends a soft-edged disk of the given value into the image.
void draw_disk(ImagePlane& img, double cy, double cx, double radius, double value)
{
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - radius - 2)));
    const int r1 = std::min(img.height() - 1, static_cast<int>(std::ceil(cy + radius + 2)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - radius - 2)));
    const int c1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cx + radius + 2)));
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
            const double d = std::hypot(r - cy, c - cx);
            const double cover = std::clamp(radius + 0.5 - d, 0.0, 1.0);
            img.at(r, c) = (1.0 - cover) * img.at(r, c) + cover * value;
        }
}

void clamp01(ImagePlane& img)
{
    for (double& v : img.values())
        v = std::clamp(v, 0.0, 1.0);
}

SynthDetectionImage render_face(int width, int height, std::uint64_t seed)
{
    Rng rng(seed);
    ImagePlane img = smooth_texture(width, height, rng, 6, 0.15, 0.15 * width, 0.6 * width);

    // fine-grained skin texture
    for (double& v : img.values())
        v += 0.03 * rng.normal();

    const double s = std::min(width, height);
    const double face_cy = 0.5 * height + rng.uniform(-0.03, 0.03) * height;
    const double face_cx = 0.5 * width + rng.uniform(-0.03, 0.03) * width;
    const double ry = 0.45 * height;
    const double rx = 0.36 * width;
    const double face_gain = rng.uniform(0.08, 0.16);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const double e = std::pow((r - face_cy) / ry, 2) + std::pow((c - face_cx) / rx, 2);
            if (e < 1.0)
                img.at(r, c) += face_gain * (1.0 - e * e);
        }

    const double eye_row = face_cy - 0.08 * height;
    auto jitter = [&](double scale) { return rng.uniform(-scale, scale); };
    const GridPoint left{static_cast<int>(std::lround(eye_row + jitter(0.03 * height))),
                         static_cast<int>(std::lround(face_cx - 0.19 * width + jitter(0.03 * width)))};
    const GridPoint right{static_cast<int>(std::lround(eye_row + jitter(0.03 * height))),
                          static_cast<int>(std::lround(face_cx + 0.19 * width + jitter(0.03 * width)))};

    const double radius = 0.065 * s * rng.uniform(0.9, 1.1);
    const double dark = rng.uniform(0.0, 0.12);
    // Left eye: plain dark disk. Right eye (target): dark disk with a bright pupil highlight.
    draw_disk(img, left.row, left.col, radius, dark);
    draw_disk(img, right.row, right.col, radius, dark);
    draw_disk(img, right.row, right.col, 0.45 * radius, rng.uniform(0.85, 1.0));
    // brows
    for (const auto& eye : {left, right})
        for (int dc = -static_cast<int>(radius * 1.3); dc <= static_cast<int>(radius * 1.3); ++dc) {
            const int r = eye.row - static_cast<int>(std::lround(radius * 2.0));
            const int c = eye.col + dc;
            if (r >= 0 && r < height && c >= 0 && c < width)
                img.at(r, c) = 0.5 * img.at(r, c) + 0.5 * dark;
        }

    const double contrast = rng.uniform(0.75, 1.1);
    const double offset = rng.uniform(-0.08, 0.08);
    for (double& v : img.values())
        v = 0.5 + contrast * (v - 0.5) + offset;
    clamp01(img);

    if (!inside(left, width, height) || !inside(right, width, height))
        throw ConfigError("synth_detection_corpus: image too small for the face layout");
    return {std::move(img), right, {left, right}};
}

}  // namespace

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
}

ImagePlane load_image(const fs::path& path)
{
    const cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (m.empty())
        throw DataError("cannot read image " + path.string());
    ImagePlane out(m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r) {
        const auto* row = m.ptr<unsigned char>(r);
        for (int c = 0; c < m.cols; ++c)
            out.at(r, c) = row[c] / 255.0;
    }
    return out;
}

void save_image(const fs::path& path, const ImagePlane& image)
{
    cv::Mat m(image.height(), image.width(), CV_8UC1);
    for (int r = 0; r < image.height(); ++r) {
        auto* row = m.ptr<unsigned char>(r);
        for (int c = 0; c < image.width(); ++c)
            row[c] = static_cast<unsigned char>(std::lround(std::clamp(image.at(r, c), 0.0, 1.0) * 255.0));
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok)
        throw DataError("cannot write image " + path.string());
}

std::pair<int, int> probe_image_size(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("missing image file " + path.string());
    std::array<unsigned char, 24> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = in.gcount();
    static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (got >= 24 && std::equal(std::begin(png_sig), std::end(png_sig), head.begin()))
        return {static_cast<int>(read_be32(&head[16])), static_cast<int>(read_be32(&head[20]))};
    if (got >= 2 && head[0] == 'P' && (head[1] == '5' || head[1] == '2')) {
        in.clear();
        in.seekg(2);
        int values[2] = {0, 0};
        for (int& v : values) {
            while (true) {
                in >> std::ws;
                if (in.peek() == '#') {
                    std::string skip;
                    std::getline(in, skip);
                    continue;
                }
                break;
            }
            in >> v;
        }
        if (in && values[0] > 0 && values[1] > 0)
            return {values[0], values[1]};
    }
    const ImagePlane img = load_image(path);
    return {img.width(), img.height()};
}

std::vector<DetectionSample> load_detection_corpus(const fs::path& manifest)
{
    std::ifstream in(manifest);
    if (!in)
        throw DataError("cannot open manifest " + manifest.string());
    const fs::path base = manifest.parent_path();
    std::vector<DetectionSample> out;
    std::string line;
    int line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_csv(line);
        const std::string where = manifest.string() + ":" + std::to_string(line_no);
        if (columns == 0) {
            static const std::vector<std::string> full = {"image",  "peak_row", "peak_col", "le_row",
                                                          "le_col", "re_row",   "re_col"};
            const bool short_ok = fields.size() == 3 && std::equal(fields.begin(), fields.end(), full.begin());
            const bool long_ok = fields.size() == 7 && fields == full;
            if (!short_ok && !long_ok)
                throw DataError(where + ": header must be image,peak_row,peak_col[,le_row,le_col,re_row,re_col]");
            columns = fields.size();
            continue;
        }
        if (fields.size() != columns)
            throw DataError(where + ": expected " + std::to_string(columns) + " columns, got " +
                            std::to_string(fields.size()));
        DetectionSample s;
        s.image = fs::path(fields[0]).is_absolute() ? fs::path(fields[0]) : base / fields[0];
        s.peak = {parse_int(fields[1], where), parse_int(fields[2], where)};
        if (columns == 7)
            s.eyes = EyePair{{parse_int(fields[3], where), parse_int(fields[4], where)},
                             {parse_int(fields[5], where), parse_int(fields[6], where)}};
        if (!fs::exists(s.image))
            throw DataError(where + ": missing image file " + s.image.string());
        const auto [w, h] = probe_image_size(s.image);
        if (!inside(s.peak, w, h))
            throw DataError(where + ": peak (" + std::to_string(s.peak.row) + "," + std::to_string(s.peak.col) +
                            ") outside the " + std::to_string(w) + "x" + std::to_string(h) + " image");
        if (s.eyes && (!inside(s.eyes->left, w, h) || !inside(s.eyes->right, w, h)))
            throw DataError(where + ": eye landmark outside the image");
        out.push_back(std::move(s));
    }
    return out;
}

void write_detection_manifest(const fs::path& manifest, const std::vector<DetectionSample>& samples)
{
    const bool with_eyes = !samples.empty() && std::all_of(samples.begin(), samples.end(),
                                                           [](const auto& s) { return s.eyes.has_value(); });
    std::ofstream out(manifest);
    if (!out)
        throw DataError("cannot write manifest " + manifest.string());
    out << "image,peak_row,peak_col";
    if (with_eyes)
        out << ",le_row,le_col,re_row,re_col";
    out << '\n';
    const fs::path base = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
    for (const auto& s : samples) {
        fs::path rel = s.image;
        std::error_code ec;
        const auto candidate = fs::relative(s.image, base, ec);
        if (!ec && !candidate.empty())
            rel = candidate;
        out << rel.generic_string() << ',' << s.peak.row << ',' << s.peak.col;
        if (with_eyes)
            out << ',' << s.eyes->left.row << ',' << s.eyes->left.col << ',' << s.eyes->right.row << ','
                << s.eyes->right.col;
        out << '\n';
    }
}

void CorruptionSpec::validate() const
{
    if (kind == CorruptionKind::gaussian_noise && !(noise_variance >= 0.0))
        throw ConfigError("corruption: noise variance must be non-negative");
    if (kind == CorruptionKind::occlusion && !(occlusion_fraction > 0.0 && occlusion_fraction < 1.0))
        throw ConfigError("corruption: occlusion fraction must lie in (0, 1)");
}

ImagePlane gaussian_noise_field(int width, int height, double variance, std::uint64_t seed)
{
    if (!(variance >= 0.0))
        throw ConfigError("gaussian noise: variance must be non-negative");
    ImagePlane out(width, height);
    if (variance == 0.0)
        return out;
    Rng rng(seed);
    const double sd = std::sqrt(variance);
    for (double& v : out.values())
        v = sd * rng.normal();
    return out;
}

ImagePlane add_gaussian_noise(const ImagePlane& image, double variance, std::uint64_t seed)
{
    const ImagePlane noise = gaussian_noise_field(image.width(), image.height(), variance, seed);
    if (variance == 0.0)
        return image;
    ImagePlane out = image;
    auto dst = out.values();
    auto src = noise.values();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = std::clamp(dst[i] + src[i], 0.0, 1.0);
    return out;
}

Rect occlusion_rect(int width, int height, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("occlusion: fraction must lie in (0, 1)");
    const double area = std::max(1.0, std::round(fraction * width * height));
    // aspect = w / h; w = sqrt(area * aspect) <= width, h = sqrt(area / aspect) <= height
    const double lo = std::max(0.5, area / (static_cast<double>(height) * height));
    const double hi = std::min(2.0, static_cast<double>(width) * width / area);
    if (lo > hi)
        throw DataError("occlusion: a rectangle of " + std::to_string(area) + " pixels cannot fit a " +
                        std::to_string(width) + "x" + std::to_string(height) + " image");
    Rng rng(seed);
    const double aspect = rng.uniform(lo, hi);
    int h = std::clamp(static_cast<int>(std::lround(std::sqrt(area / aspect))), 1, height);
    int w = std::clamp(static_cast<int>(std::lround(area / h)), 1, width);
    Rect rect;
    rect.w = w;
    rect.h = h;
    rect.x = rng.uniform_int(0, width - w);
    rect.y = rng.uniform_int(0, height - h);
    return rect;
}

ImagePlane add_occlusion(const ImagePlane& image, double fraction, std::uint64_t seed)
{
    const Rect rect = occlusion_rect(image.width(), image.height(), fraction, seed);
    ImagePlane out = image;
    for (int r = rect.y; r < rect.y + rect.h; ++r)
        for (int c = rect.x; c < rect.x + rect.w; ++c)
            out.at(r, c) = 0.0;
    return out;
}

ImagePlane apply_corruption(const ImagePlane& image, const CorruptionSpec& spec)
{
    spec.validate();
    if (spec.kind == CorruptionKind::gaussian_noise)
        return add_gaussian_noise(image, spec.noise_variance, spec.rng_seed);
    return add_occlusion(image, spec.occlusion_fraction, spec.rng_seed);
}

std::vector<SynthDetectionImage> synth_detection_corpus(int n, int width, int height, std::uint64_t seed)
{
    if (n < 1)
        throw ConfigError("synth_detection_corpus: n must be >= 1");
    if (width < 32 || height < 32)
        throw ConfigError("synth_detection_corpus: images must be at least 32x32");
    std::vector<SynthDetectionImage> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(render_face(width, height, derive_seed(seed, static_cast<std::uint64_t>(i))));
    return out;
}

SynthSequence synth_tracking_sequence(int n_frames, const MotionSpec& motion, const OcclusionEvent& occlusion,
                                      std::uint64_t seed, double noise_variance)
{
    if (n_frames < 2)
        throw ConfigError("synth_tracking_sequence: need at least two frames");
    if (motion.target_width < 4 || motion.target_height < 4 || motion.frame_width < motion.target_width ||
        motion.frame_height < motion.target_height)
        throw ConfigError("synth_tracking_sequence: degenerate frame or target size");
    if (!(noise_variance >= 0.0))
        throw ConfigError("synth_tracking_sequence: noise variance must be non-negative");
    if (occlusion.first_frame >= 0 &&
        (occlusion.last_frame < occlusion.first_frame || !(occlusion.fraction > 0.0 && occlusion.fraction <= 1.0)))
        throw ConfigError("synth_tracking_sequence: invalid occlusion event");

    Rng rng(derive_seed(seed, 0));
    const ImagePlane background =
        smooth_texture(motion.frame_width, motion.frame_height, rng, 8, 0.25, 12.0, 60.0);

    const int tw = motion.target_width;
    const int th = motion.target_height;
    Rng target_rng(derive_seed(seed, 1));
    ImagePlane target = smooth_texture(tw, th, target_rng, 4, 0.2, 0.3 * tw, 0.8 * tw);
    // concentric ring plus a bright bar make the target distinct from the background
    const double tcy = (th - 1) / 2.0;
    const double tcx = (tw - 1) / 2.0;
    for (int r = 0; r < th; ++r)
        for (int c = 0; c < tw; ++c) {
            const double d = std::hypot(r - tcy, c - tcx) / (0.5 * std::min(tw, th));
            if (d > 0.55 && d < 0.8)
                target.at(r, c) = 0.1;
            if (std::abs(r - tcy) < 0.12 * th && std::abs(c - tcx) < 0.35 * tw)
                target.at(r, c) = 0.9;
        }

    Rng occ_rng(derive_seed(seed, 2));
    const ImagePlane occluder = smooth_texture(tw, th, occ_rng, 5, 0.3, 4.0, 10.0);

    SynthSequence seq;
    for (int t = 0; t < n_frames; ++t) {
        const double phase = 2.0 * std::numbers::pi * t / motion.period;
        const int x = static_cast<int>(std::lround(motion.x0 + motion.vx * t + motion.amplitude_x * std::sin(phase)));
        const int y = static_cast<int>(std::lround(motion.y0 + motion.vy * t + motion.amplitude_y * std::sin(phase)));
        const bool out_of_view = x < 0 || y < 0 || x + tw > motion.frame_width || y + th > motion.frame_height;
        if (out_of_view && !motion.allow_out_of_view)
            throw DataError("synth_tracking_sequence: target leaves the frame at frame " + std::to_string(t));

        ImagePlane frame = background;
        const int occluded_cols = occlusion.active(t) ? static_cast<int>(std::lround(occlusion.fraction * tw)) : 0;
        for (int r = 0; r < th; ++r)
            for (int c = 0; c < tw; ++c) {
                const int fr = y + r;
                const int fc = x + c;
                if (fr < 0 || fc < 0 || fr >= motion.frame_height || fc >= motion.frame_width)
                    continue;
                frame.at(fr, fc) = c < occluded_cols ? occluder.at(r, c) : target.at(r, c);
            }
        if (noise_variance > 0.0)
            frame = add_gaussian_noise(frame, noise_variance, derive_seed(seed, 1000 + static_cast<std::uint64_t>(t)));
        clamp01(frame);
        seq.frames.push_back(std::move(frame));
        seq.boxes.push_back({x, y, tw, th});
    }
    return seq;
}

std::vector<fs::path> list_sequence_frames(const fs::path& dir)
{
    fs::path root = dir;
    if (fs::is_directory(dir / "img"))
        root = dir / "img";
    if (!fs::is_directory(root))
        throw DataError("sequence directory not found: " + dir.string());
    static const std::vector<std::string> exts = {".jpg", ".jpeg", ".png", ".pgm", ".bmp", ".ppm", ".tif", ".tiff"};
    struct Entry {
        long long number;
        std::string name;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_regular_file())
            continue;
        const std::string ext = lower(e.path().extension().string());
        if (std::find(exts.begin(), exts.end(), ext) == exts.end())
            continue;
        const std::string stem = e.path().stem().string();
        std::string digits;
        for (char ch : stem)
            if (std::isdigit(static_cast<unsigned char>(ch)))
                digits.push_back(ch);
        const long long number = digits.empty() ? -1 : std::stoll(digits.substr(0, 18));
        entries.push_back({number, e.path().filename().string(), e.path()});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.number != b.number ? a.number < b.number : a.name < b.name;
    });
    std::vector<fs::path> out;
    for (auto& e : entries)
        out.push_back(std::move(e.path));
    return out;
}

}  // namespace lccf
