#include "nidf/csv.hpp"
#include "nidf/normalize.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace nidf;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::path(::testing::TempDir()) / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST(LoadCsv, HeaderNoLabel) {
    const auto path = write_temp("plain.csv", "a,b\n1,2\n3,4\n");
    const DataMatrix X = load_csv(path);
    ASSERT_EQ(X.n_samples(), 2);
    ASSERT_EQ(X.n_features(), 2);
    EXPECT_EQ(X.values(0, 0), 1.0);
    EXPECT_EQ(X.values(0, 1), 2.0);
    EXPECT_EQ(X.values(1, 0), 3.0);
    EXPECT_EQ(X.values(1, 1), 4.0);
    EXPECT_FALSE(X.has_labels());
    EXPECT_EQ(X.feature_ids, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsv, LabelColumnByName) {
    const auto path = write_temp("labeled.csv", "x,y,cls\n0,1,A\n2,3,A\n4,5,B\n");
    const DataMatrix X = load_csv(path, LabelColumn::by_name("cls"));
    ASSERT_EQ(X.n_samples(), 3);
    ASSERT_EQ(X.n_features(), 2);
    EXPECT_EQ(X.labels, (std::vector<int>{0, 0, 1}));
    EXPECT_EQ(X.n_classes(), 2);
    EXPECT_EQ(X.values(2, 1), 5.0);
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
    const auto path = write_temp("bad.csv", "a\n1\noops\n");
    try {
        load_csv(path);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column a"), std::string::npos) << msg;
    }
}

TEST(LoadCsv, RaggedRowRejected) {
    const auto path = write_temp("ragged.csv", "a,b\n1,2\n3\n");
    EXPECT_THROW(load_csv(path), InputError);
}

TEST(LoadCsv, MissingFileRejected) {
    EXPECT_THROW(load_csv("/nonexistent/definitely_not_here.csv"), InputError);
}

TEST(LoadCsv, LabelByIndexWithoutHeader) {
    const auto path = write_temp("noheader.csv", "1,2,0\n3,4,1\n5,6,1\n");
    const DataMatrix X = load_csv(path, LabelColumn::by_index(2), /*has_header=*/false);
    ASSERT_EQ(X.n_features(), 2);
    EXPECT_EQ(X.labels, (std::vector<int>{0, 1, 1}));
}

TEST(LoadCsv, LabelByNameRequiresHeader) {
    const auto path = write_temp("nh2.csv", "1,2\n3,4\n");
    EXPECT_THROW(load_csv(path, LabelColumn::by_name("cls"), false), InputError);
}

TEST(ZScore, HandComputedColumn) {
    DataMatrix X;
    X.values = Matrix(3, 1);
    X.values << 1, 2, 3;
    const DataMatrix Z = zscore_normalize(X);
    // mean 2, population sigma = sqrt(2/3)
    EXPECT_NEAR(Z.values(0, 0), -1.224744871391589, 1e-12);
    EXPECT_NEAR(Z.values(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(Z.values(2, 0), 1.224744871391589, 1e-12);
}

TEST(ZScore, ConstantColumnMapsToZeros) {
    DataMatrix X;
    X.values = Matrix(3, 2);
    X.values << 5, 1, 5, 2, 5, 3;
    const DataMatrix Z = zscore_normalize(X);
    EXPECT_EQ(Z.values(0, 0), 0.0);
    EXPECT_EQ(Z.values(1, 0), 0.0);
    EXPECT_EQ(Z.values(2, 0), 0.0);
}

TEST(ZScore, IdempotentWithin1e10) {
    std::mt19937_64 rng(7);
    DataMatrix X;
    X.values = Matrix(40, 6);
    for (Index i = 0; i < 40; ++i)
        for (Index j = 0; j < 6; ++j)
            X.values(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 100.0 - 50.0;
    const DataMatrix once = zscore_normalize(X);
    const DataMatrix twice = zscore_normalize(once);
    EXPECT_LT((once.values - twice.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ZScore, StandardizedColumnUnchanged) {
    DataMatrix X;
    X.values = Matrix(3, 1);
    X.values << -1.224744871391589, 0.0, 1.224744871391589;
    const DataMatrix Z = zscore_normalize(X);
    EXPECT_LT((Z.values - X.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MinMax, MapsToUnitRange) {
    DataMatrix X;
    X.values = Matrix(3, 2);
    X.values << 2, 7, 4, 7, 6, 7;
    const DataMatrix M = minmax_normalize(X);
    EXPECT_DOUBLE_EQ(M.values(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(M.values(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(M.values(2, 0), 1.0);
    EXPECT_EQ(M.values(1, 1), 0.0);  // constant column
}

TEST(RoundTrip, WriteLoadBitEqual) {
    std::mt19937_64 rng(99);
    DataMatrix X;
    X.values = Matrix(17, 5);
    for (Index i = 0; i < 17; ++i)
        for (Index j = 0; j < 5; ++j)
            X.values(i, j) = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 1e6;
    X.values(0, 0) = 0.1;   // not exactly representable
    X.values(1, 1) = -1e-300;
    const std::string path =
        (std::filesystem::path(::testing::TempDir()) / "roundtrip.csv").string();
    write_csv(X, path);
    const DataMatrix Y = load_csv(path);
    ASSERT_EQ(Y.values.rows(), X.values.rows());
    for (Index i = 0; i < X.values.rows(); ++i)
        for (Index j = 0; j < X.values.cols(); ++j)
            EXPECT_EQ(X.values(i, j), Y.values(i, j)) << "at " << i << "," << j;
}

TEST(ScoreCsv, RoundTrips) {
    Vector s(3);
    s << 0.25, 1.0 / 3.0, 0.5;
    const std::string path = (std::filesystem::path(::testing::TempDir()) / "score.csv").string();
    write_score_csv({"a", "b", "c"}, s, path);
    auto [ids, back] = read_score_csv(path);
    EXPECT_EQ(ids, (std::vector<std::string>{"a", "b", "c"}));
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(back[j], s[j]);
}

TEST(Validate, RejectsBadMatrices) {
    DataMatrix one_row;
    one_row.values = Matrix::Zero(1, 3);
    EXPECT_THROW(one_row.validate(), InputError);

    DataMatrix nan;
    nan.values = Matrix::Zero(3, 2);
    nan.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(nan.validate(), InputError);

    DataMatrix short_labels;
    short_labels.values = Matrix::Zero(3, 2);
    short_labels.labels = {0, 1};
    EXPECT_THROW(short_labels.validate(), InputError);
}
