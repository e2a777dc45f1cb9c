/* CWE-188 belongs to no weakness class in the default taxonomy. */
#include "std_testcase.h"

void CWE188_Reliance_on_Data_Memory_Layout__union_01_bad()
{
    union
    {
        short first;
        int second;
    } u;
    u.second = 1;
    printIntLine(u.first);
}

void CWE188_Reliance_on_Data_Memory_Layout__union_01_good()
{
    int value = 1;
    printIntLine(value);
}
